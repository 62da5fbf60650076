//! Seeded LBRC sampling and Monte-Carlo rate experiments.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Open01};

use crate::data::{Dataset, EvalGrid, LbrcObservation};
use crate::estimators::EstimatorBundle;
use crate::influence::{
    population_integrability, representation_terms, OracleContext, Representation, SignConvention,
};
use crate::truth::{Censoring, Family, Population, TruthModel};
use crate::{Error, Result};

/// Default upper bound for the integrability diagnostic.
pub const DEFAULT_CAP: f64 = 1e4;
pub const MIN_REPS: usize = 50;

/// A sample together with the latent length-biased survival times.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentSample {
    pub dataset: Dataset,
    pub t: Vec<f64>,
}

pub fn sample_lbrc(model: &TruthModel, n: usize, seed: u64) -> Result<Dataset> {
    sample_lbrc_latent(model, n, seed).map(|s| s.dataset)
}

/// Draws `T` from the length-biased density `t f(t) / μ`, `A = U T`,
/// `V = T - A`, censors `V` by an independent exponential `C`.
pub fn sample_lbrc_latent(model: &TruthModel, n: usize, seed: u64) -> Result<LatentSample> {
    if n == 0 {
        return Err(Error::Precondition("sample size must be at least 1"));
    }
    let (shape, scale) = match model.family() {
        Family::Exponential { rate } => (1.0, 1.0 / rate),
        Family::Weibull { shape, scale } => (shape, scale),
    };
    let gamma = Gamma::new(1.0 + 1.0 / shape, 1.0).map_err(|_| Error::Configuration("invalid shape"))?;
    let censor = match model.censoring() {
        Censoring::None => None,
        Censoring::Exponential { rate } => Some(Exp::new(rate).map_err(|_| Error::Configuration("invalid censoring rate"))?),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obs = Vec::with_capacity(n);
    let mut latent = Vec::with_capacity(n);
    while obs.len() < n {
        let x: f64 = gamma.sample(&mut rng);
        let t = if shape == 1.0 { scale * x } else { scale * libm::pow(x, 1.0 / shape) };
        let u: f64 = Open01.sample(&mut rng);
        let c = match &censor {
            Some(e) => e.sample(&mut rng),
            None => f64::INFINITY,
        };
        let a = u * t;
        let v = t - a;
        if !(a > 0.0 && v > 0.0) {
            // Only reachable through underflow; redraw.
            continue;
        }
        let (v_obs, delta) = if v <= c { (v, true) } else { (c, false) };
        obs.push(LbrcObservation::new(a, v_obs, delta)?);
        latent.push(t);
    }
    Ok(LatentSample { dataset: Dataset::new(obs)?, t: latent })
}

/// Child seed for replication `rep` at sample size `n`.
pub fn derive_seed(seed: u64, n: usize, rep: usize) -> u64 {
    let mut z = seed;
    for word in [n as u64, rep as u64] {
        z = splitmix64(z ^ splitmix64(word.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    z
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    Rn1,
    Rn2,
    Rn3,
    /// `sup |F̄ₙ - F̃ₙ|`.
    FBarGap,
    /// `sup |Λ̃_A - Λ_A|`.
    TruncationHazard,
    /// `sup |Λ̃ - Λ|`.
    Hazard,
}

impl Which {
    pub fn target_exponent(self) -> f64 {
        match self {
            Which::Rn1 | Which::Rn2 | Which::Rn3 => -0.75,
            Which::FBarGap => -1.0,
            Which::TruncationHazard | Which::Hazard => -0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Which::Rn1 => "rn1",
            Which::Rn2 => "rn2",
            Which::Rn3 => "rn3",
            Which::FBarGap => "fbar-gap",
            Which::TruncationHazard => "trunc-hazard",
            Which::Hazard => "hazard",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.trim().to_ascii_lowercase().as_str() {
            "rn1" => Which::Rn1,
            "rn2" => Which::Rn2,
            "rn3" => Which::Rn3,
            "fbar-gap" => Which::FBarGap,
            "trunc-hazard" => Which::TruncationHazard,
            "hazard" => Which::Hazard,
            _ => return None,
        })
    }

    fn needs_influence(self) -> bool {
        matches!(self, Which::Rn1 | Which::Rn2 | Which::Rn3)
    }
}

/// The sup-norm quantity of one replication. For [`Which::Rn2`] `primary`
/// uses [`SignConvention::Minus`] and `alternate` the other sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateValue {
    pub primary: f64,
    pub alternate: Option<f64>,
}

fn sup_over<F: Fn(f64) -> f64>(grid: &EvalGrid, f: F) -> f64 {
    grid.points().iter().fold(0.0f64, |s, &t| s.max(libm::fabs(f(t))))
}

/// Everything a replication needs that does not depend on the replication.
pub struct Experiment<'a> {
    model: &'a TruthModel,
    which: Which,
    grid: EvalGrid,
    seed: u64,
    oracle: Option<OracleContext<'a>>,
}

impl<'a> Experiment<'a> {
    /// Validates the window and builds the oracle tables. The integrability
    /// diagnostic over `[grid.lower(), grid.b()]` must stay below `cap`, and
    /// `b` must lie below the 95th percentile of the total time.
    pub fn new(model: &'a TruthModel, which: Which, grid: EvalGrid, seed: u64, cap: f64) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Precondition("evaluation grid is empty"));
        }
        population_integrability(model, grid.lower(), grid.b(), cap)?;
        if grid.b() >= model.quantile_h(0.95)? {
            return Err(Error::Precondition("grid must end below the 95th percentile of the total time"));
        }
        let oracle = if which.needs_influence() { Some(OracleContext::new(model, grid.b())?) } else { None };
        Ok(Self { model, which, grid, seed, oracle })
    }

    pub fn which(&self) -> Which {
        self.which
    }

    pub fn grid(&self) -> &EvalGrid {
        &self.grid
    }

    pub fn replicate(&self, n: usize, rep: usize) -> Result<ReplicateValue> {
        let child = derive_seed(self.seed, n, rep);
        let d = sample_lbrc(self.model, n, child)?;
        let fit = EstimatorBundle::fit(&d);
        let m = self.model;
        let value = match self.which {
            Which::FBarGap => ReplicateValue {
                primary: sup_over(&self.grid, |t| fit.f_bar.eval_at(t) - fit.f_tilde.eval_at(t)),
                alternate: None,
            },
            Which::TruncationHazard => ReplicateValue {
                primary: sup_over(&self.grid, |t| fit.lambda_a_tilde.eval_at(t) - m.cum_hazard_a(t)),
                alternate: None,
            },
            Which::Hazard => ReplicateValue {
                primary: sup_over(&self.grid, |t| fit.lambda_tilde.eval_at(t) - m.cum_hazard(t)),
                alternate: None,
            },
            Which::Rn1 | Which::Rn2 | Which::Rn3 => {
                let ctx = self.oracle.as_ref().expect("oracle built for representations");
                let terms = match representation_terms(&fit, &d, ctx, &self.grid) {
                    Ok(t) => t,
                    Err(_) => return Err(Error::NonFiniteResidual { n, rep, seed: child }),
                };
                match self.which {
                    Which::Rn1 => ReplicateValue {
                        primary: terms.report(Representation::Rn1, &self.grid).residual_sup,
                        alternate: None,
                    },
                    Which::Rn3 => ReplicateValue {
                        primary: terms.report(Representation::Rn3, &self.grid).residual_sup,
                        alternate: None,
                    },
                    _ => ReplicateValue {
                        primary: terms.report(Representation::Rn2(SignConvention::Minus), &self.grid).residual_sup,
                        alternate: Some(
                            terms.report(Representation::Rn2(SignConvention::Plus), &self.grid).residual_sup,
                        ),
                    },
                }
            }
        };
        if !value.primary.is_finite() || value.alternate.is_some_and(|v| !v.is_finite()) {
            return Err(Error::NonFiniteResidual { n, rep, seed: child });
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionSeries {
    pub convention: SignConvention,
    pub sup_residuals: Vec<Vec<f64>>,
    pub medians: Vec<f64>,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub which: Which,
    pub sample_sizes: Vec<usize>,
    /// `sup_residuals[k][rep]` for `sample_sizes[k]`.
    pub sup_residuals: Vec<Vec<f64>>,
    pub medians: Vec<f64>,
    /// Least-squares slope of `ln median` against `ln n`.
    pub slope: f64,
    pub target_exponent: f64,
    /// Sign convention of the reported series (representation of `F̃ₙ` only).
    pub convention: Option<SignConvention>,
    /// The other sign convention, kept for comparison.
    pub alternate: Option<ConventionSeries>,
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m == 0 {
        f64::NAN
    } else if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Ordinary least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| libm::log(*v)).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn check_design(sizes: &[usize], reps: usize) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::Precondition("need >= 2 sizes"));
    }
    if sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("sample sizes must be positive and strictly increasing"));
    }
    if reps < MIN_REPS {
        return Err(Error::Precondition("need >= 50 replications"));
    }
    Ok(())
}

impl RateReport {
    /// Builds the report from per-size replicate values.
    pub fn assemble(which: Which, sizes: &[usize], values: Vec<Vec<ReplicateValue>>) -> Result<Self> {
        let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
        let series = |pick: &dyn Fn(&ReplicateValue) -> f64| {
            let sup: Vec<Vec<f64>> = values.iter().map(|row| row.iter().map(pick).collect()).collect();
            let medians: Vec<f64> = sup.iter().map(|r| median(r)).collect();
            let slope = log_log_slope(&xs, &medians);
            (sup, medians, slope)
        };
        let (sup, medians, slope) = series(&|v| v.primary);
        let mut report = RateReport {
            which,
            sample_sizes: sizes.to_vec(),
            sup_residuals: sup,
            medians,
            slope,
            target_exponent: which.target_exponent(),
            convention: None,
            alternate: None,
        };
        if which == Which::Rn2 {
            let (alt_sup, alt_medians, alt_slope) = series(&|v| v.alternate.unwrap_or(f64::NAN));
            let mut minus = ConventionSeries {
                convention: SignConvention::Minus,
                sup_residuals: core::mem::take(&mut report.sup_residuals),
                medians: core::mem::take(&mut report.medians),
                slope: report.slope,
            };
            let mut plus =
                ConventionSeries { convention: SignConvention::Plus, sup_residuals: alt_sup, medians: alt_medians, slope: alt_slope };
            // Report whichever convention decays faster.
            if plus.slope < minus.slope {
                core::mem::swap(&mut minus, &mut plus);
            }
            report.sup_residuals = minus.sup_residuals;
            report.medians = minus.medians;
            report.slope = minus.slope;
            report.convention = Some(minus.convention);
            report.alternate = Some(plus);
        }
        if !report.slope.is_finite() {
            return Err(Error::Precondition("a median residual is zero; slope undefined"));
        }
        Ok(report)
    }
}

/// Runs every replication serially. The result depends only on the inputs.
pub fn rate_experiment(
    model: &TruthModel,
    sizes: &[usize],
    reps: usize,
    which: Which,
    grid: &EvalGrid,
    seed: u64,
) -> Result<RateReport> {
    rate_experiment_with_cap(model, sizes, reps, which, grid, seed, DEFAULT_CAP)
}

pub fn rate_experiment_with_cap(
    model: &TruthModel,
    sizes: &[usize],
    reps: usize,
    which: Which,
    grid: &EvalGrid,
    seed: u64,
    cap: f64,
) -> Result<RateReport> {
    check_design(sizes, reps)?;
    let exp = Experiment::new(model, which, grid.clone(), seed, cap)?;
    let values = sizes
        .iter()
        .map(|&n| (0..reps).map(|rep| exp.replicate(n, rep)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    RateReport::assemble(which, sizes, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencySummary {
    pub n: usize,
    pub reps: usize,
    pub median_sup_f: f64,
    pub median_sup_lambda: f64,
}

/// Median over replications of `sup |F̃ₙ - F|` and `sup |Λ̃ - Λ|` on the grid.
pub fn consistency_check(
    model: &TruthModel,
    n: usize,
    reps: usize,
    grid: &EvalGrid,
    seed: u64,
) -> Result<ConsistencySummary> {
    if reps < MIN_REPS {
        return Err(Error::Precondition("need >= 50 replications"));
    }
    if n == 0 || grid.is_empty() {
        return Err(Error::Precondition("need n >= 1 and a non-empty grid"));
    }
    let mut sup_f = Vec::with_capacity(reps);
    let mut sup_l = Vec::with_capacity(reps);
    for rep in 0..reps {
        let child = derive_seed(seed, n, rep);
        let fit = EstimatorBundle::fit(&sample_lbrc(model, n, child)?);
        let f = sup_over(grid, |t| fit.f_tilde.eval_at(t) - model.cdf(t));
        let l = sup_over(grid, |t| fit.lambda_tilde.eval_at(t) - model.cum_hazard(t));
        if !(f.is_finite() && l.is_finite()) {
            return Err(Error::NonFiniteResidual { n, rep, seed: child });
        }
        sup_f.push(f);
        sup_l.push(l);
    }
    Ok(ConsistencySummary { n, reps, median_sup_f: median(&sup_f), median_sup_lambda: median(&sup_l) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic() {
        let m = TruthModel::default_scenario();
        assert_eq!(sample_lbrc(&m, 50, 7).unwrap(), sample_lbrc(&m, 50, 7).unwrap());
        assert_ne!(sample_lbrc(&m, 50, 7).unwrap(), sample_lbrc(&m, 50, 8).unwrap());
    }

    #[test]
    fn no_censoring_gives_events_and_latent_totals() {
        let m = TruthModel::new(Family::Exponential { rate: 1.0 }, Censoring::None).unwrap();
        let s = sample_lbrc_latent(&m, 200, 1).unwrap();
        for (o, t) in s.dataset.iter().zip(&s.t) {
            assert!(o.delta());
            assert!((o.y() - t).abs() <= 1e-12 * t);
        }
    }

    #[test]
    fn observations_respect_ordering() {
        let m = TruthModel::new(Family::Weibull { shape: 2.0, scale: 1.5 }, Censoring::Exponential { rate: 0.4 })
            .unwrap();
        let s = sample_lbrc_latent(&m, 500, 3).unwrap();
        for (o, t) in s.dataset.iter().zip(&s.t) {
            assert!(0.0 < o.a() && o.a() < o.y() && o.a() < *t);
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(sample_lbrc(&TruthModel::default_scenario(), 0, 1).is_err());
    }

    #[test]
    fn child_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|r| derive_seed(1, 10, r)).collect();
        let mut u = s.clone();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), s.len());
        assert_ne!(derive_seed(1, 10, 0), derive_seed(1, 11, 0));
    }

    #[test]
    fn design_checks() {
        assert!(check_design(&[100], 200).is_err());
        assert!(check_design(&[100, 100], 200).is_err());
        assert!(check_design(&[100, 200], 49).is_err());
        assert!(check_design(&[100, 200], 50).is_ok());
        let m = TruthModel::default_scenario();
        let g = m.quantile_grid(0.1, 0.9, 5).unwrap();
        assert!(consistency_check(&m, 100, 0, &g, 1).is_err());
    }

    #[test]
    fn median_and_slope() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let x = [100.0, 200.0, 400.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.75)).collect();
        assert!((log_log_slope(&x, &y) + 0.75).abs() < 1e-12);
    }
}
