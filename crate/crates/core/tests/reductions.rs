//! The classical estimator against textbook Kaplan-Meier, Lynden-Bell and
//! Nelson-Aalen on continuous data, where equality is exact.

mod support;

use lbrc_core::data::{Dataset, LbrcObservation};
use lbrc_core::empirical::EmpiricalBundle;
use lbrc_core::estimators::{estimate_s_a_tilde, estimate_tjw, EstimatorBundle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::brute;

fn check_curve(f: &lbrc_core::step::StepFunction, oracle: &[(f64, f64)]) {
    assert_eq!(f.jump_times().len(), oracle.len());
    for (&(t, v), (&ft, &fv)) in oracle.iter().zip(f.jump_times().iter().zip(f.values())) {
        assert_eq!(t, ft);
        assert_eq!(v, fv, "at {t}");
    }
}

#[test]
fn untruncated_tjw_is_kaplan_meier() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..100 {
        let n = rng.random_range(1..=100);
        let times: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..5.0)).collect();
        let events: Vec<bool> = (0..n).map(|_| rng.random_bool(0.6)).collect();
        let d = Dataset::new(
            times.iter().zip(&events).map(|(&t, &e)| LbrcObservation::new(0.0, t, e).unwrap()).collect(),
        )
        .unwrap();
        check_curve(&estimate_tjw(&d), &brute::kaplan_meier(&times, &events));
    }
}

#[test]
fn uncensored_tjw_is_lynden_bell() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..100 {
        let n = rng.random_range(1..=100);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..3.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..3.0)).collect();
        let y: Vec<f64> = a.iter().zip(&v).map(|(a, v)| a + v).collect();
        let d = Dataset::new(a.iter().zip(&v).map(|(&a, &v)| LbrcObservation::new(a, v, true).unwrap()).collect())
            .unwrap();
        check_curve(&estimate_tjw(&d), &brute::lynden_bell(&a, &y));
    }
}

#[test]
fn ties_in_kaplan_meier_reduction() {
    // (a, y, δ) = (0,1,1), (0,2,0): F̂(1) = 0.5, F̂(2) = 0.5.
    let d = Dataset::new(vec![LbrcObservation::new(0.0, 1.0, true).unwrap(), LbrcObservation::new(0.0, 2.0, false).unwrap()])
        .unwrap();
    let f = estimate_tjw(&d);
    assert_eq!(f.eval_at(1.0), 0.5);
    assert_eq!(f.eval_at(2.0), 0.5);
}

#[test]
fn untruncated_hazard_is_nelson_aalen() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..50 {
        let n = rng.random_range(1..=80);
        // Coarse times give ties.
        let times: Vec<f64> = (0..n).map(|_| rng.random_range(1..=20) as f64 * 0.25).collect();
        let events: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
        let d = Dataset::new(
            times.iter().zip(&events).map(|(&t, &e)| LbrcObservation::new(0.0, t, e).unwrap()).collect(),
        )
        .unwrap();
        let fit = EstimatorBundle::fit(&d);
        for (u, h) in brute::nelson_aalen(&times, &events) {
            assert!((fit.lambda_hat.eval_at(u) - h).abs() < 1e-13);
        }
    }
}

#[test]
fn pooled_truncation_survival_is_kaplan_meier_on_pooled_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..50 {
        let n = rng.random_range(1..=60);
        let obs: Vec<LbrcObservation> = (0..n)
            .map(|_| LbrcObservation::new(rng.random_range(0.01..4.0), rng.random_range(0.01..4.0), true).unwrap())
            .collect();
        let pooled: Vec<f64> = obs.iter().flat_map(|o| [o.a(), o.v()]).collect();
        let km = brute::kaplan_meier(&pooled, &vec![true; pooled.len()]);
        let s_a = estimate_s_a_tilde(&EmpiricalBundle::from_dataset(&Dataset::new(obs).unwrap()));
        for (u, f) in km {
            assert!((s_a.eval_at(u) - (1.0 - f)).abs() < 1e-14);
        }
    }
}
