//! Empirical counting processes of an LBRC sample.
//!
//! With `n` subjects:
//!
//! - `N̄(t) = n⁻¹ #{i : δᵢ = 1, yᵢ <= t}`
//! - `R̄(t) = n⁻¹ #{i : aᵢ <= t <= yᵢ}`
//! - `Q̃(t) = n⁻¹ Σ [I(aᵢ <= t) + δᵢ I(ṽᵢ <= t)]`
//! - `K̃(t) = n⁻¹ Σ [I(aᵢ >= t) + I(ṽᵢ >= t)]`
//!
//! `Q̃` and `K̃` treat the truncation times and the residual times as one
//! pooled sample of size `2n`, since both share the marginal density
//! `S(t)/μ`.

use alloc::vec::Vec;

use crate::data::Dataset;
use crate::step::{MixedStep, StepFunction};

/// A distinct time of the pooled `{aᵢ} ∪ {ṽᵢ : δᵢ = 1}` sample where `Q̃`
/// jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledPoint {
    pub time: f64,
    /// `n ΔQ̃(time)`.
    pub jumps: usize,
    /// `n K̃(time)`, counting values `>= time`.
    pub at_risk: usize,
}

/// A distinct uncensored total time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventPoint {
    pub time: f64,
    /// `n ΔN̄(time)`.
    pub events: usize,
    /// `n R̄(time)`.
    pub at_risk: usize,
    /// `#{j : yⱼ >= time}`.
    pub y_at_risk: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QkParts {
    pub q1_tilde: StepFunction,
    pub q2_tilde: StepFunction,
    pub q_tilde: StepFunction,
    pub k1_tilde: MixedStep,
    pub k2_tilde: MixedStep,
    pub k_tilde: MixedStep,
}

/// All raw processes of one dataset, plus integer tallies at their jump
/// points so that estimators can form exact count ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalBundle {
    n: usize,
    pub n_bar: StepFunction,
    pub r_bar: MixedStep,
    /// `n⁻¹ #{j : yⱼ >= t}`.
    pub y_at_risk: MixedStep,
    pub q1_tilde: StepFunction,
    pub q2_tilde: StepFunction,
    pub q_tilde: StepFunction,
    pub k1_tilde: MixedStep,
    pub k2_tilde: MixedStep,
    pub k_tilde: MixedStep,
    pooled: Vec<PooledPoint>,
    events: Vec<EventPoint>,
}

/// Sorted copies of the sample coordinates.
#[derive(Debug, Clone, PartialEq)]
struct SortedSample {
    pub a: Vec<f64>,
    pub v: Vec<f64>,
    pub y: Vec<f64>,
    /// Residual times of uncensored subjects.
    pub v_events: Vec<f64>,
    /// Total times of uncensored subjects.
    pub y_events: Vec<f64>,
}

impl SortedSample {
    fn new(d: &Dataset) -> Self {
        let sorted = |f: &dyn Fn(&crate::data::LbrcObservation) -> Option<f64>| {
            let mut xs: Vec<f64> = d.iter().filter_map(f).collect();
            xs.sort_by(f64::total_cmp);
            xs
        };
        Self {
            a: sorted(&|o| Some(o.a())),
            v: sorted(&|o| Some(o.v())),
            y: sorted(&|o| Some(o.y())),
            v_events: sorted(&|o| o.delta().then_some(o.v())),
            y_events: sorted(&|o| o.delta().then_some(o.y())),
        }
    }
}

#[inline]
fn count_le(xs: &[f64], t: f64) -> usize {
    xs.partition_point(|&x| x <= t)
}

#[inline]
fn count_lt(xs: &[f64], t: f64) -> usize {
    xs.partition_point(|&x| x < t)
}

pub fn build_n_bar(d: &Dataset) -> StepFunction {
    StepFunction::counting(d.iter().filter(|o| o.delta()).map(|o| o.y()), d.n() as f64)
}

pub fn build_r_bar(d: &Dataset) -> MixedStep {
    let n = d.n() as f64;
    MixedStep::new(
        StepFunction::counting(d.iter().map(|o| o.a()), n),
        StepFunction::counting(d.iter().map(|o| o.y()), n).map_values(|v| -v),
    )
}

pub fn build_q_k(d: &Dataset) -> QkParts {
    let n = d.n() as f64;
    let q1_tilde = StepFunction::counting(d.iter().map(|o| o.a()), n);
    let q2_tilde = StepFunction::counting(d.iter().filter(|o| o.delta()).map(|o| o.v()), n);
    let q_tilde = StepFunction::counting(
        d.iter()
            .map(|o| o.a())
            .chain(d.iter().filter(|o| o.delta()).map(|o| o.v())),
        n,
    );
    let k1_tilde = MixedStep::left_only(StepFunction::strict_tail(d.iter().map(|o| o.a()), n));
    let k2_tilde = MixedStep::left_only(StepFunction::strict_tail(d.iter().map(|o| o.v()), n));
    let k_tilde = MixedStep::left_only(StepFunction::strict_tail(
        d.iter().map(|o| o.a()).chain(d.iter().map(|o| o.v())),
        n,
    ));
    QkParts { q1_tilde, q2_tilde, q_tilde, k1_tilde, k2_tilde, k_tilde }
}

impl EmpiricalBundle {
    pub fn from_dataset(d: &Dataset) -> Self {
        let n = d.n();
        let sorted = SortedSample::new(d);
        let QkParts { q1_tilde, q2_tilde, q_tilde, k1_tilde, k2_tilde, k_tilde } = build_q_k(d);

        let pooled = q_tilde
            .jump_times()
            .iter()
            .map(|&u| {
                let jumps = (count_le(&sorted.a, u) - count_lt(&sorted.a, u))
                    + (count_le(&sorted.v_events, u) - count_lt(&sorted.v_events, u));
                let at_risk = (n - count_lt(&sorted.a, u)) + (n - count_lt(&sorted.v, u));
                PooledPoint { time: u, jumps, at_risk }
            })
            .collect();

        let n_bar = build_n_bar(d);
        let events = n_bar
            .jump_times()
            .iter()
            .map(|&u| {
                let events = count_le(&sorted.y_events, u) - count_lt(&sorted.y_events, u);
                let y_at_risk = n - count_lt(&sorted.y, u);
                let at_risk = count_le(&sorted.a, u) - count_lt(&sorted.y, u);
                EventPoint { time: u, events, at_risk, y_at_risk }
            })
            .collect();

        Self {
            n,
            n_bar,
            r_bar: build_r_bar(d),
            y_at_risk: MixedStep::left_only(StepFunction::strict_tail(d.iter().map(|o| o.y()), n as f64)),
            q1_tilde,
            q2_tilde,
            q_tilde,
            k1_tilde,
            k2_tilde,
            k_tilde,
            pooled,
            events,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pooled_points(&self) -> &[PooledPoint] {
        &self.pooled
    }

    pub fn event_points(&self) -> &[EventPoint] {
        &self.events
    }
}
