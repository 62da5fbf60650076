//! Piecewise-constant functions.
//!
//! [`StepFunction`] is right-continuous (càdlàg): its value at a jump point is
//! the value after the jump. Quantities with closed-interval semantics, such
//! as `#{i : a_i <= t <= y_i}` or `#{i : a_i >= t}`, are represented by
//! [`MixedStep`], the sum of a right-continuous part and a part read through
//! its left limit.

use alloc::vec::Vec;

use crate::data::EvalGrid;
use crate::{Error, Result};

/// Anything that can be evaluated pointwise and has left limits.
pub trait Curve {
    fn eval_at(&self, t: f64) -> f64;
    fn left_limit_at(&self, t: f64) -> f64;
}

/// Wraps a continuous function so it can be compared against step curves.
#[derive(Debug, Clone, Copy)]
pub struct FnCurve<F>(pub F);

impl<F: Fn(f64) -> f64> Curve for FnCurve<F> {
    fn eval_at(&self, t: f64) -> f64 {
        (self.0)(t)
    }

    fn left_limit_at(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    jump_times: Vec<f64>,
    values: Vec<f64>,
    initial_value: f64,
}

impl StepFunction {
    /// `values[i]` holds on `[jump_times[i], jump_times[i + 1])`.
    pub fn new(jump_times: Vec<f64>, values: Vec<f64>, initial_value: f64) -> Result<Self> {
        if jump_times.len() != values.len() {
            return Err(Error::InvalidArgument("jump_times and values differ in length"));
        }
        if jump_times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("jump times must be finite"));
        }
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("jump times must be strictly increasing"));
        }
        Ok(Self { jump_times, values, initial_value })
    }

    pub fn constant(value: f64) -> Self {
        Self { jump_times: Vec::new(), values: Vec::new(), initial_value: value }
    }

    /// Builds `initial + sum of increments at times <= t`. Increments sharing a
    /// time are merged into one jump.
    pub fn from_increments<I>(initial_value: f64, increments: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut incs: Vec<(f64, f64)> = increments.into_iter().collect();
        incs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut jump_times = Vec::with_capacity(incs.len());
        let mut values = Vec::with_capacity(incs.len());
        let mut level = initial_value;
        for (t, d) in incs {
            level += d;
            if jump_times.last() == Some(&t) {
                *values.last_mut().unwrap() = level;
            } else {
                jump_times.push(t);
                values.push(level);
            }
        }
        Self { jump_times, values, initial_value }
    }

    /// The counting function `t -> #{x in times : x <= t} / denom`, with the
    /// counts kept as integers so the values are exact quotients.
    pub fn counting<I>(times: I, denom: f64) -> Self
    where
        I: IntoIterator<Item = f64>,
    {
        let (jump_times, counts) = tally(times);
        let mut cum = 0usize;
        let values = counts
            .iter()
            .map(|&c| {
                cum += c;
                cum as f64 / denom
            })
            .collect();
        Self { jump_times, values, initial_value: 0.0 }
    }

    /// The tail function `t -> #{x in times : x > t} / denom`.
    pub fn strict_tail<I>(times: I, denom: f64) -> Self
    where
        I: IntoIterator<Item = f64>,
    {
        let (jump_times, counts) = tally(times);
        let total: usize = counts.iter().sum();
        let mut remaining = total;
        let values = counts
            .iter()
            .map(|&c| {
                remaining -= c;
                remaining as f64 / denom
            })
            .collect();
        Self { jump_times, values, initial_value: total as f64 / denom }
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial_value)
    }

    pub fn len(&self) -> usize {
        self.jump_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jump_times.is_empty()
    }

    pub fn eval_at(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&x| x <= t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    pub fn left_limit_at(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&x| x < t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// `(time, jump size)` pairs in ascending time order.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.jump_times.iter().enumerate().map(move |(i, &t)| {
            let before = if i == 0 { self.initial_value } else { self.values[i - 1] };
            (t, self.values[i] - before)
        })
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            jump_times: self.jump_times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            initial_value: f(self.initial_value),
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        let mut prev = self.initial_value;
        self.values.iter().all(|&v| {
            let ok = v >= prev;
            prev = v;
            ok
        })
    }

    pub fn is_nonincreasing(&self) -> bool {
        let mut prev = self.initial_value;
        self.values.iter().all(|&v| {
            let ok = v <= prev;
            prev = v;
            ok
        })
    }
}

impl Curve for StepFunction {
    fn eval_at(&self, t: f64) -> f64 {
        StepFunction::eval_at(self, t)
    }

    fn left_limit_at(&self, t: f64) -> f64 {
        StepFunction::left_limit_at(self, t)
    }
}

fn tally<I: IntoIterator<Item = f64>>(times: I) -> (Vec<f64>, Vec<usize>) {
    let mut xs: Vec<f64> = times.into_iter().collect();
    xs.sort_by(f64::total_cmp);
    let mut jump_times: Vec<f64> = Vec::with_capacity(xs.len());
    let mut counts: Vec<usize> = Vec::with_capacity(xs.len());
    for x in xs {
        if jump_times.last() == Some(&x) {
            *counts.last_mut().unwrap() += 1;
        } else {
            jump_times.push(x);
            counts.push(1);
        }
    }
    (jump_times, counts)
}

/// `f(t) = right(t) + left(t-)`.
///
/// The `left` part contributes its left limit, so a jump of `left` at `s`
/// only takes effect strictly after `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStep {
    right: StepFunction,
    left: StepFunction,
}

impl MixedStep {
    pub fn new(right: StepFunction, left: StepFunction) -> Self {
        Self { right, left }
    }

    pub fn right_only(right: StepFunction) -> Self {
        Self { right, left: StepFunction::constant(0.0) }
    }

    pub fn left_only(left: StepFunction) -> Self {
        Self { right: StepFunction::constant(0.0), left }
    }

    pub fn right_part(&self) -> &StepFunction {
        &self.right
    }

    pub fn left_part(&self) -> &StepFunction {
        &self.left
    }

    pub fn eval_at(&self, t: f64) -> f64 {
        self.right.eval_at(t) + self.left.left_limit_at(t)
    }

    pub fn left_limit_at(&self, t: f64) -> f64 {
        self.right.left_limit_at(t) + self.left.left_limit_at(t)
    }

    /// Limit from the right, `f(t+)`.
    pub fn right_limit_at(&self, t: f64) -> f64 {
        self.right.eval_at(t) + self.left.eval_at(t)
    }

    /// Sorted union of the jump points of both parts.
    pub fn jump_times(&self) -> Vec<f64> {
        merge_sorted(self.right.jump_times(), self.left.jump_times())
    }
}

impl Curve for MixedStep {
    fn eval_at(&self, t: f64) -> f64 {
        MixedStep::eval_at(self, t)
    }

    fn left_limit_at(&self, t: f64) -> f64 {
        MixedStep::left_limit_at(self, t)
    }
}

pub(crate) fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// Largest `|f(t) - g(t)|` over the grid points.
pub fn sup_norm_diff<F: Curve + ?Sized, G: Curve + ?Sized>(
    f: &F,
    g: &G,
    grid: &EvalGrid,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("evaluation grid is empty"));
    }
    Ok(grid
        .points()
        .iter()
        .map(|&t| libm::fabs(f.eval_at(t) - g.eval_at(t)))
        .fold(0.0, f64::max))
}

/// Exact supremum of `|f - g|` over `[lower, upper]` for two step functions:
/// both the value and the left limit are checked at every jump inside the
/// window.
pub fn sup_norm_diff_exact(f: &StepFunction, g: &StepFunction, lower: f64, upper: f64) -> f64 {
    let mut sup = libm::fabs(f.eval_at(lower) - g.eval_at(lower));
    for &t in merge_sorted(f.jump_times(), g.jump_times()).iter() {
        if t > lower && t <= upper {
            sup = sup.max(libm::fabs(f.eval_at(t) - g.eval_at(t)));
            sup = sup.max(libm::fabs(f.left_limit_at(t) - g.left_limit_at(t)));
        }
    }
    sup
}
