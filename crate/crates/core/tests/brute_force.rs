mod support;

use lbrc_core::empirical::EmpiricalBundle;
use lbrc_core::estimators::{product_limit_from_hazard, EstimatorBundle};
use proptest::prelude::*;
use support::brute::{self, Obs};

// Half the coordinates come from a coarse lattice so that ties between
// truncation times, residuals and totals are common.
fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![(1u32..=6).prop_map(|k| k as f64 * 0.5), 0.01f64..3.0]
}

fn obs() -> impl Strategy<Value = Obs> {
    (coord(), coord(), prop::bool::weighted(0.7)).prop_map(|(a, v, delta)| Obs { a, v, delta })
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn estimators_match_literal_definitions(xs in prop::collection::vec(obs(), 1..=10)) {
        let fit = EstimatorBundle::fit(&brute::to_dataset(&xs));
        for t in brute::probe_times(&xs) {
            prop_assert!(close(fit.s_a_tilde.eval_at(t), brute::s_a(&xs, t)), "S_A at {}", t);
            prop_assert!(close(fit.r_tilde.eval_at(t), brute::r_tilde(&xs, t)), "R at {}", t);
            prop_assert!(close(fit.lambda_hat.eval_at(t), brute::lambda_hat(&xs, t)), "lambda_hat at {}", t);
            prop_assert!(close(fit.lambda_tilde.eval_at(t), brute::lambda_tilde(&xs, t)), "lambda at {}", t);
            prop_assert!(close(fit.f_tjw.eval_at(t), brute::f_tjw(&xs, t)), "tjw at {}", t);
            prop_assert!(close(fit.f_tilde.eval_at(t), brute::f_tilde(&xs, t)), "F at {}", t);
            prop_assert!(close(fit.f_bar.eval_at(t), brute::f_bar(&xs, t)), "F bar at {}", t);
            prop_assert!(close(fit.lambda_a_tilde.eval_at(t), brute::lambda_a_tilde(&xs, t)), "lambda_A at {}", t);
        }
    }

    #[test]
    fn processes_match_direct_counts(xs in prop::collection::vec(obs(), 1..=50)) {
        let e = EmpiricalBundle::from_dataset(&brute::to_dataset(&xs));
        for t in brute::probe_times(&xs) {
            prop_assert!(close(e.n_bar.eval_at(t), brute::n_bar(&xs, t)));
            prop_assert!(close(e.r_bar.eval_at(t), brute::r_bar(&xs, t)));
            prop_assert!(close(e.q_tilde.eval_at(t), brute::q_tilde(&xs, t)));
            prop_assert!(close(e.k_tilde.eval_at(t), brute::k_tilde(&xs, t)));
            prop_assert!(close(e.q_tilde.eval_at(t), e.q1_tilde.eval_at(t) + e.q2_tilde.eval_at(t)));
            prop_assert!(close(e.k_tilde.eval_at(t), e.k1_tilde.eval_at(t) + e.k2_tilde.eval_at(t)));
        }
        let n = xs.len() as f64;
        let events = xs.iter().filter(|o| o.delta).count() as f64;
        prop_assert!(close(e.q_tilde.final_value(), 1.0 + events / n));
        prop_assert!(close(e.k_tilde.right_limit_at(0.0), 2.0));
        prop_assert!(e.q_tilde.is_nondecreasing() && e.n_bar.is_nondecreasing());
    }

    #[test]
    fn curves_are_valid_distributions(xs in prop::collection::vec(obs(), 1..=60)) {
        let fit = EstimatorBundle::fit(&brute::to_dataset(&xs));
        prop_assert!(fit.s_a_tilde.is_nonincreasing());
        for f in [&fit.f_tjw, &fit.f_tilde, &fit.f_bar] {
            prop_assert!(f.is_nondecreasing());
            prop_assert!(f.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
        for l in [&fit.lambda_hat, &fit.lambda_tilde, &fit.lambda_a_tilde] {
            prop_assert!(l.is_nondecreasing() && l.initial_value() == 0.0);
        }
        let via_hazard = product_limit_from_hazard(&fit.lambda_tilde);
        for t in brute::probe_times(&xs) {
            prop_assert!(close(via_hazard.eval_at(t), fit.f_tilde.eval_at(t)));
        }
    }
}
