use lbrc_core::estimators::EstimatorBundle;
use lbrc_core::simulation::{consistency_check, median, rate_experiment, sample_lbrc, Which};
use lbrc_core::truth::TruthModel;
use lbrc_core::Error;

#[test]
fn doubling_n_shrinks_sup_error_by_root_two() {
    let m = TruthModel::default_scenario();
    let grid = m.quantile_grid(0.1, 0.9, 25).unwrap();
    let a = consistency_check(&m, 1000, 200, &grid, 77).unwrap();
    let b = consistency_check(&m, 2000, 200, &grid, 77).unwrap();
    let ratio = b.median_sup_f / a.median_sup_f;
    assert!((0.6..=0.8).contains(&ratio), "ratio {ratio}");
    assert!(matches!(consistency_check(&m, 1000, 0, &grid, 77), Err(Error::Precondition(_))));
}

#[test]
fn representation_residuals_decrease_with_n() {
    let m = TruthModel::default_scenario();
    let grid = m.quantile_grid(0.1, 0.9, 25).unwrap();
    let sizes = [250, 500, 1000, 2000];
    for which in [Which::Rn1, Which::Rn3] {
        let r = rate_experiment(&m, &sizes, 100, which, &grid, 78).unwrap();
        assert!(r.medians.windows(2).all(|w| w[1] < w[0]), "{which:?}: {:?}", r.medians);
    }
}

#[test]
fn exponential_of_truncation_hazard_tracks_product_limit() {
    let m = TruthModel::default_scenario();
    let grid = m.quantile_grid(0.1, 0.9, 25).unwrap();
    let gap = |n: usize| {
        let sups: Vec<f64> = (0..25)
            .map(|rep| {
                let fit = EstimatorBundle::fit(&sample_lbrc(&m, n, 900 + rep).unwrap());
                grid.points()
                    .iter()
                    .map(|&t| ((-fit.lambda_a_tilde.eval_at(t)).exp() - fit.s_a_tilde.eval_at(t)).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        median(&sups)
    };
    let (small, large) = (gap(200), gap(5000));
    assert!(large < small && large < 1e-3, "{small} -> {large}");
}

#[test]
fn single_size_is_rejected() {
    let m = TruthModel::default_scenario();
    let grid = m.quantile_grid(0.1, 0.9, 5).unwrap();
    let e = rate_experiment(&m, &[100], 60, Which::Rn2, &grid, 1).unwrap_err();
    assert_eq!(e, Error::Precondition("need >= 2 sizes"));
}
