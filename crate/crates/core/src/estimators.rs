//! Product-limit and cumulative-hazard estimators.
//!
//! Every estimator is computed from integer tallies at the jump points of the
//! empirical processes, so count ratios such as `d / r` are formed once and
//! not as differences of rounded proportions.

use alloc::vec::Vec;

use crate::data::Dataset;
use crate::empirical::EmpiricalBundle;
use crate::step::{MixedStep, StepFunction};

#[inline]
fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// `Π_{u <= t} (1 - ΔQ̃(u) / K̃(u))` with `0/0 = 0`.
pub fn estimate_s_a_tilde(e: &EmpiricalBundle) -> StepFunction {
    let mut surv = 1.0;
    let mut times = Vec::with_capacity(e.pooled_points().len());
    let mut values = Vec::with_capacity(e.pooled_points().len());
    for p in e.pooled_points() {
        if p.at_risk > 0 {
            surv *= clamp_unit(1.0 - p.jumps as f64 / p.at_risk as f64);
        }
        times.push(p.time);
        values.push(surv);
    }
    StepFunction::new(times, values, 1.0).expect("pooled points are sorted")
}

/// `R̃(t) = n⁻¹ #{j : yⱼ >= t} - S̃_A(t)`, which may be negative in finite
/// samples.
pub fn estimate_r_tilde(d: &Dataset, s_a: &StepFunction) -> MixedStep {
    MixedStep::new(
        s_a.map_values(|v| -v),
        StepFunction::strict_tail(d.iter().map(|o| o.y()), d.n() as f64),
    )
}

/// `n R̃` at each event point.
fn scaled_r_tilde_at_events(e: &EmpiricalBundle, s_a: &StepFunction) -> Vec<f64> {
    let n = e.n() as f64;
    e.event_points()
        .iter()
        .map(|p| p.y_at_risk as f64 - n * s_a.eval_at(p.time))
        .collect()
}

/// `Σ_{u <= t} ΔN̄(u) / max(R̃(u), 1/n)`.
pub fn estimate_lambda_tilde(e: &EmpiricalBundle, s_a: &StepFunction) -> StepFunction {
    let nr = scaled_r_tilde_at_events(e, s_a);
    StepFunction::from_increments(
        0.0,
        e.event_points().iter().zip(nr).map(|(p, r)| (p.time, p.events as f64 / r.max(1.0))),
    )
}

/// `Σ_{u <= t} ΔN̄(u) / max(R̄(u), 1/n)`.
pub fn estimate_lambda_hat(e: &EmpiricalBundle) -> StepFunction {
    StepFunction::from_increments(
        0.0,
        e.event_points()
            .iter()
            .map(|p| (p.time, p.events as f64 / (p.at_risk.max(1)) as f64)),
    )
}

/// Distribution function `1 - Π (1 - ΔΛ)` of a cumulative hazard, with each
/// factor clamped to `[0, 1]`.
pub fn product_limit_from_hazard(lambda: &StepFunction) -> StepFunction {
    let mut surv = 1.0;
    let mut prev = lambda.initial_value();
    let values = lambda
        .values()
        .iter()
        .map(|&v| {
            surv *= clamp_unit(1.0 - (v - prev));
            prev = v;
            1.0 - surv
        })
        .collect();
    StepFunction::new(lambda.jump_times().to_vec(), values, 0.0).expect("jump times come from a step function")
}

/// `F̃ₙ` built straight from the event tallies.
pub fn estimate_f_tilde(e: &EmpiricalBundle, s_a: &StepFunction) -> StepFunction {
    let nr = scaled_r_tilde_at_events(e, s_a);
    product_limit(e, nr.iter().map(|r| r.max(1.0)), false)
}

/// `1 - F̄ₙ(x) = Π_{yᵢ <= x} [1 - 1/(n R̃(yᵢ) + 1)]^δᵢ`.
pub fn estimate_f_bar(e: &EmpiricalBundle, s_a: &StepFunction) -> StepFunction {
    let nr = scaled_r_tilde_at_events(e, s_a);
    product_limit(e, nr.iter().map(|r| r + 1.0), true)
}

/// The classical estimator `1 - F̂ₙ(x) = Π_{yᵢ <= x} [1 - 1/(n R̄(yᵢ))]^δᵢ`.
pub fn estimate_tjw(d: &Dataset) -> StepFunction {
    estimate_tjw_from(&EmpiricalBundle::from_dataset(d))
}

pub(crate) fn estimate_tjw_from(e: &EmpiricalBundle) -> StepFunction {
    product_limit(e, e.event_points().iter().map(|p| p.at_risk as f64), true)
}

/// Product over event points with per-point denominators `r`. With
/// `per_subject` each of the `d` tied events contributes its own factor
/// `1 - 1/r`; otherwise the point contributes `1 - d/r`.
fn product_limit<I: Iterator<Item = f64>>(e: &EmpiricalBundle, denoms: I, per_subject: bool) -> StepFunction {
    let mut surv = 1.0;
    let mut times = Vec::with_capacity(e.event_points().len());
    let mut values = Vec::with_capacity(e.event_points().len());
    for (p, r) in e.event_points().iter().zip(denoms) {
        if per_subject {
            let factor = clamp_unit(1.0 - 1.0 / r);
            for _ in 0..p.events {
                surv *= factor;
            }
        } else {
            surv *= clamp_unit(1.0 - p.events as f64 / r);
        }
        times.push(p.time);
        values.push(1.0 - surv);
    }
    StepFunction::new(times, values, 0.0).expect("event points are sorted")
}

/// `Σ_{u <= t} ΔQ̃(u) / K̃(u)` with `0/0 = 0`.
pub fn estimate_lambda_a_tilde(e: &EmpiricalBundle) -> StepFunction {
    StepFunction::from_increments(
        0.0,
        e.pooled_points()
            .iter()
            .filter(|p| p.at_risk > 0)
            .map(|p| (p.time, p.jumps as f64 / p.at_risk as f64)),
    )
}

/// Every fitted curve for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorBundle {
    pub empirical: EmpiricalBundle,
    pub s_a_tilde: StepFunction,
    pub r_tilde: MixedStep,
    pub lambda_hat: StepFunction,
    pub lambda_tilde: StepFunction,
    pub f_tjw: StepFunction,
    pub f_tilde: StepFunction,
    pub f_bar: StepFunction,
    pub lambda_a_tilde: StepFunction,
}

impl EstimatorBundle {
    pub fn fit(d: &Dataset) -> Self {
        let empirical = EmpiricalBundle::from_dataset(d);
        let s_a_tilde = estimate_s_a_tilde(&empirical);
        let r_tilde = estimate_r_tilde(d, &s_a_tilde);
        let lambda_tilde = estimate_lambda_tilde(&empirical, &s_a_tilde);
        Self {
            lambda_hat: estimate_lambda_hat(&empirical),
            f_tjw: estimate_tjw_from(&empirical),
            f_tilde: estimate_f_tilde(&empirical, &s_a_tilde),
            f_bar: estimate_f_bar(&empirical, &s_a_tilde),
            lambda_a_tilde: estimate_lambda_a_tilde(&empirical),
            empirical,
            s_a_tilde,
            r_tilde,
            lambda_tilde,
        }
    }

    pub fn n(&self) -> usize {
        self.empirical.n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LbrcObservation;
    use alloc::vec;

    fn ds(rows: &[(f64, f64, bool)]) -> Dataset {
        Dataset::new(rows.iter().map(|&(a, v, d)| LbrcObservation::new(a, v, d).unwrap()).collect())
            .unwrap()
    }

    fn one(delta: bool) -> EstimatorBundle {
        EstimatorBundle::fit(&ds(&[(1.0, 2.0, delta)]))
    }

    #[test]
    fn s_a_tilde_hand_products() {
        let f = one(true);
        assert_eq!(f.s_a_tilde.eval_at(0.5), 1.0);
        assert_eq!(f.s_a_tilde.eval_at(1.5), 0.5);
        assert_eq!(f.s_a_tilde.eval_at(2.0), 0.0);
        let c = one(false);
        assert_eq!(c.s_a_tilde.eval_at(1.5), 0.5);
        assert_eq!(c.s_a_tilde.eval_at(50.0), 0.5);
    }

    #[test]
    fn r_tilde_hand_values() {
        let f = one(true);
        assert_eq!(f.r_tilde.eval_at(1.5), 0.5);
        assert_eq!(f.r_tilde.eval_at(3.0), 1.0);
        assert_eq!(f.r_tilde.eval_at(3.5), 0.0);
    }

    #[test]
    fn hazards_hand_values() {
        let f = one(true);
        assert_eq!(f.lambda_tilde.eval_at(2.99), 0.0);
        assert_eq!(f.lambda_tilde.eval_at(3.0), 1.0);
        assert_eq!(f.lambda_hat.eval_at(3.0), 1.0);
        assert_eq!(f.lambda_a_tilde.eval_at(1.0), 0.5);
        assert_eq!(f.lambda_a_tilde.eval_at(2.0), 1.5);
        let c = one(false);
        assert!(c.lambda_tilde.is_empty());
        assert_eq!(c.f_bar.eval_at(10.0), 0.0);
    }

    #[test]
    fn f_bar_and_f_tilde_hand_values() {
        let f = one(true);
        assert_eq!(f.f_bar.eval_at(3.0), 0.5);
        assert_eq!(f.f_tilde.eval_at(3.0), 1.0);
    }

    #[test]
    fn product_limit_examples() {
        let single = StepFunction::new(vec![2.0], vec![1.0], 0.0).unwrap();
        assert_eq!(product_limit_from_hazard(&single).eval_at(2.0), 1.0);
        assert!(product_limit_from_hazard(&StepFunction::constant(0.0)).is_empty());
        let halves = StepFunction::new(vec![1.0, 2.0], vec![0.5, 1.0], 0.0).unwrap();
        assert_eq!(product_limit_from_hazard(&halves).eval_at(2.0), 0.75);
    }

    #[test]
    fn tjw_hand_values() {
        let ecdf = estimate_tjw(&ds(&[(0.0, 1.0, true), (0.0, 2.0, true)]));
        assert_eq!(ecdf.eval_at(1.0), 0.5);
        assert_eq!(ecdf.eval_at(2.0), 1.0);
        assert_eq!(estimate_tjw(&ds(&[(0.0, 1.0, false)])).eval_at(5.0), 0.0);
        let km = estimate_tjw(&ds(&[(0.0, 1.0, true), (0.0, 2.0, false)]));
        assert_eq!(km.eval_at(1.0), 0.5);
        assert_eq!(km.eval_at(2.0), 0.5);
    }

    #[test]
    fn hazard_path_matches_direct_path() {
        let d = ds(&[(0.3, 1.1, true), (0.9, 0.2, false), (0.1, 2.2, true), (1.4, 0.7, true), (0.6, 0.6, true)]);
        let f = EstimatorBundle::fit(&d);
        let via_hazard = product_limit_from_hazard(&f.lambda_tilde);
        for &t in f.f_tilde.jump_times() {
            assert!((via_hazard.eval_at(t) - f.f_tilde.eval_at(t)).abs() < 1e-14);
        }
    }
}
