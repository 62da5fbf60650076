//! Observation records, datasets and evaluation grids.

use alloc::vec::Vec;

use crate::{Error, Result};

/// One subject of a prevalent cohort: truncation time `a` (onset to
/// enrolment), observed residual time `v` (enrolment to event or censoring)
/// and the event indicator. The total observed time is `y = a + v`.
///
/// Truncation times of exactly zero are accepted so that untruncated data
/// (the Kaplan-Meier special case) can be represented; file ingestion
/// enforces `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbrcObservation {
    a: f64,
    v: f64,
    delta: bool,
    y: f64,
}

impl LbrcObservation {
    pub fn new(a: f64, v: f64, delta: bool) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::InvalidObservation("truncation time must be finite and >= 0"));
        }
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidObservation("residual time must be finite and >= 0"));
        }
        Ok(Self { a, v, delta, y: a + v })
    }

    /// Builds the record from the total time `y >= a` instead of the residual.
    pub fn from_total(a: f64, y: f64, delta: bool) -> Result<Self> {
        if !y.is_finite() || y < a {
            return Err(Error::InvalidObservation("total time must be finite and >= a"));
        }
        let mut obs = Self::new(a, y - a, delta)?;
        obs.y = y;
        Ok(obs)
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn v(&self) -> f64 {
        self.v
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn delta(&self) -> bool {
        self.delta
    }
}

/// A non-empty sample of observations in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    observations: Vec<LbrcObservation>,
}

impl Dataset {
    pub fn new(observations: Vec<LbrcObservation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { observations })
    }

    pub fn n(&self) -> usize {
        self.observations.len()
    }

    pub fn observations(&self) -> &[LbrcObservation] {
        &self.observations
    }

    pub fn iter(&self) -> core::slice::Iter<'_, LbrcObservation> {
        self.observations.iter()
    }

    pub fn event_count(&self) -> usize {
        self.observations.iter().filter(|o| o.delta).count()
    }

    pub fn max_y(&self) -> f64 {
        self.observations.iter().map(|o| o.y).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a LbrcObservation;
    type IntoIter = core::slice::Iter<'a, LbrcObservation>;

    fn into_iter(self) -> Self::IntoIter {
        self.observations.iter()
    }
}

/// Sorted evaluation times inside `(0, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    points: Vec<f64>,
    b: f64,
}

impl EvalGrid {
    pub fn new(points: Vec<f64>, b: f64) -> Result<Self> {
        if !b.is_finite() || b <= 0.0 {
            return Err(Error::InvalidArgument("grid upper endpoint must be finite and > 0"));
        }
        if points.iter().any(|&t| !(t > 0.0 && t <= b)) {
            return Err(Error::InvalidArgument("grid points must lie in (0, b]"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid points must be strictly increasing"));
        }
        Ok(Self { points, b })
    }

    /// `count` equally spaced points from `lower` to `upper`, both included.
    pub fn equispaced(lower: f64, upper: f64, count: usize) -> Result<Self> {
        if count == 0 || !(lower > 0.0) || upper < lower {
            return Err(Error::InvalidArgument("need count >= 1 and 0 < lower <= upper"));
        }
        let points = if count == 1 {
            alloc::vec![upper]
        } else {
            let step = (upper - lower) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { upper } else { lower + step * i as f64 })
                .collect()
        };
        Self::new(points, upper)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// First grid point, or `b` for an empty grid.
    pub fn lower(&self) -> f64 {
        self.points.first().copied().unwrap_or(self.b)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
