//! Parametric population models with known truth.
//!
//! Under stationary incidence the sampled survival time `T` has density
//! `t f(t) / μ`, the truncation time is `A = U T` with `U` uniform, and the
//! residual `V = T - A` is censored by an independent exponential `C`. The
//! population functions used by the estimators then reduce to
//!
//! - `f_A = f_V = S / μ`, `S_A(t) = ∫_t^∞ S / μ`
//! - `R(t) = S(t) G(t) / μ` with `G(t) = ∫_0^t S_C`
//! - `dFᵘ(t) = f(t) G(t) / μ`
//! - `K = S_A (1 + S_C)`, `dQ = f_A (1 + S_C)`
//! - `dH(t) = [f(t) G(t) + S(t) F_C(t)] / μ`
//!
//! The exponential family is evaluated in closed form; the Weibull family
//! through tabulated prefix integrals.

use crate::data::EvalGrid;
use crate::quadrature::CumulativeTable;
use crate::{Error, Result};

/// Population quantities needed by the influence functions and diagnostics.
pub trait Population: Sync {
    /// `R(t) = P(A <= t <= Y)`.
    fn r(&self, t: f64) -> f64;
    /// Density of `Fᵘ(t) = P(Δ = 1, Y <= t)`.
    fn f_u_density(&self, t: f64) -> f64;
    /// Distribution function `F` of the unbiased survival time.
    fn cdf(&self, t: f64) -> f64;
    fn cum_hazard(&self, t: f64) -> f64;
    fn s_a(&self, t: f64) -> f64;
    /// `K(t) = P(A >= t) + P(Ṽ >= t)`.
    fn k(&self, t: f64) -> f64;
    /// Density of `Q(t) = P(A <= t) + P(Δ = 1, Ṽ <= t)`.
    fn q_density(&self, t: f64) -> f64;

    /// `1 - S_A(t)`; override when cancellation near zero matters.
    fn one_minus_s_a(&self, t: f64) -> f64 {
        1.0 - self.s_a(t)
    }

    fn cum_hazard_a(&self, t: f64) -> f64 {
        -libm::log(self.s_a(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Censoring {
    None,
    Exponential { rate: f64 },
}

const TABLE_CELLS: usize = 1 << 14;
// Tables stop where S falls below about 1e-17.
const TAIL_LOG: f64 = 39.0;

#[derive(Debug, Clone)]
struct Tables {
    s: CumulativeTable,
    f_u: CumulativeTable,
    q: CumulativeTable,
    h: CumulativeTable,
}

#[derive(Debug, Clone)]
pub struct TruthModel {
    family: Family,
    censoring: Censoring,
    mu: f64,
    tables: Option<Tables>,
}

impl TruthModel {
    pub fn new(family: Family, censoring: Censoring) -> Result<Self> {
        let mu = match family {
            Family::Exponential { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::Configuration("exponential rate must be finite and > 0"));
                }
                1.0 / rate
            }
            Family::Weibull { shape, scale } => {
                if !(shape.is_finite() && (0.5..=50.0).contains(&shape)) {
                    return Err(Error::Configuration("weibull shape must lie in [0.5, 50]"));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::Configuration("weibull scale must be finite and > 0"));
                }
                scale * libm::tgamma(1.0 + 1.0 / shape)
            }
        };
        if let Censoring::Exponential { rate } = censoring {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::Configuration("censoring rate must be finite and > 0"));
            }
        }
        let mut model = Self { family, censoring, mu, tables: None };
        if let Family::Weibull { .. } = family {
            let upper = model.tail_point();
            let m = &model;
            let tables = Tables {
                s: CumulativeTable::build(|t| m.survival(t), 0.0, upper, TABLE_CELLS)
                    .map_err(|_| Error::Configuration("survival table failed"))?,
                f_u: CumulativeTable::build(|t| m.f_u_density(t), 0.0, upper, TABLE_CELLS)
                    .map_err(|_| Error::Configuration("subdistribution table failed"))?,
                q: CumulativeTable::build(|t| m.q_density(t), 0.0, upper, TABLE_CELLS)
                    .map_err(|_| Error::Configuration("pooled distribution table failed"))?,
                h: CumulativeTable::build(|t| m.h_density(t), 0.0, upper, TABLE_CELLS)
                    .map_err(|_| Error::Configuration("total time table failed"))?,
            };
            model.tables = Some(tables);
        }
        Ok(model)
    }

    /// Exponential(1) survival with exponential(0.5) residual censoring.
    pub fn default_scenario() -> Self {
        Self::new(Family::Exponential { rate: 1.0 }, Censoring::Exponential { rate: 0.5 })
            .expect("valid parameters")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn censoring(&self) -> Censoring {
        self.censoring
    }

    /// `μ = E[T⁰]`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `P(Y >= A)`, which is one because `Y = A + Ṽ`.
    pub fn alpha(&self) -> f64 {
        1.0
    }

    pub fn a_h(&self) -> f64 {
        0.0
    }

    pub fn b_h(&self) -> f64 {
        f64::INFINITY
    }

    fn tail_point(&self) -> f64 {
        match self.family {
            Family::Exponential { rate } => TAIL_LOG / rate,
            Family::Weibull { shape, scale } => scale * libm::pow(TAIL_LOG, 1.0 / shape),
        }
    }

    fn tables(&self) -> &Tables {
        self.tables.as_ref().expect("tables exist for tabulated families")
    }

    fn tabulated(&self, table: &CumulativeTable, t: f64) -> f64 {
        table.eval(t).unwrap_or_else(|| table.total())
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        libm::exp(-self.cum_hazard(t))
    }

    pub fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Exponential { rate } => rate * libm::exp(-rate * t),
            Family::Weibull { shape, scale } => {
                let z = t / scale;
                shape / scale * libm::pow(z, shape - 1.0) * libm::exp(-libm::pow(z, shape))
            }
        }
    }

    /// Censoring survival `S_C`.
    pub fn s_c(&self, t: f64) -> f64 {
        match self.censoring {
            Censoring::None => 1.0,
            Censoring::Exponential { rate } => {
                if t <= 0.0 {
                    1.0
                } else {
                    libm::exp(-rate * t)
                }
            }
        }
    }

    /// `G(t) = ∫_0^t S_C`.
    pub fn g(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.censoring {
            Censoring::None => t,
            Censoring::Exponential { rate } => -libm::expm1(-rate * t) / rate,
        }
    }

    /// Density of `A` (and of `V`).
    pub fn f_a(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.survival(t) / self.mu
        }
    }

    /// Subdistribution `Fᵘ(t)`.
    pub fn f_u(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match (self.family, self.censoring) {
            (Family::Exponential { rate }, Censoring::None) => {
                -libm::expm1(-rate * t) - rate * t * libm::exp(-rate * t)
            }
            (Family::Exponential { rate: l }, Censoring::Exponential { rate: c }) => {
                l * l / c * (-libm::expm1(-l * t) / l + libm::expm1(-(l + c) * t) / (l + c))
            }
            _ => self.tabulated(&self.tables().f_u, t),
        }
    }

    /// Probability of an uncensored observation, `Fᵘ(∞)`.
    pub fn event_probability(&self) -> f64 {
        match (self.family, self.censoring) {
            (_, Censoring::None) => 1.0,
            (Family::Exponential { rate: l }, Censoring::Exponential { rate: c }) => l / (l + c),
            _ => self.tables().f_u.total(),
        }
    }

    /// `Q(t) = ∫_0^t q`.
    pub fn q(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match (self.family, self.censoring) {
            (Family::Exponential { rate }, Censoring::None) => -2.0 * libm::expm1(-rate * t),
            (Family::Exponential { rate: l }, Censoring::Exponential { rate: c }) => {
                -libm::expm1(-l * t) - l / (l + c) * libm::expm1(-(l + c) * t)
            }
            _ => self.tabulated(&self.tables().q, t),
        }
    }

    /// Density of the total observed time `Y`.
    pub fn h_density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let f_c = 1.0 - self.s_c(t);
        (self.density(t) * self.g(t) + self.survival(t) * f_c) / self.mu
    }

    /// Distribution function `H` of `Y`.
    pub fn h(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match (self.family, self.censoring) {
            (Family::Exponential { rate }, Censoring::None) => {
                -libm::expm1(-rate * t) - rate * t * libm::exp(-rate * t)
            }
            (Family::Exponential { rate: l }, Censoring::Exponential { rate: c }) => {
                l * (l + c) / c * (-libm::expm1(-l * t) / l + libm::expm1(-(l + c) * t) / (l + c))
            }
            _ => self.tabulated(&self.tables().h, t),
        }
    }

    /// `F⁻¹(p)` for `p` in `[0, 1)`.
    pub fn quantile_f(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidArgument("probability must lie in [0, 1)"));
        }
        let z = -libm::log1p(-p);
        Ok(match self.family {
            Family::Exponential { rate } => z / rate,
            Family::Weibull { shape, scale } => scale * libm::pow(z, 1.0 / shape),
        })
    }

    /// `H⁻¹(p)` by bisection.
    pub fn quantile_h(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidArgument("probability must lie in [0, 1)"));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        let mut hi = self.mu;
        while self.h(hi) < p {
            hi *= 2.0;
            if hi > 1e6 * self.tail_point() {
                return Err(Error::Configuration("total time quantile not bracketed"));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if self.h(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// `count` points at equally spaced probabilities of `F` from `p_lo` to
    /// `p_hi`; the grid endpoint `b` is the last point.
    pub fn quantile_grid(&self, p_lo: f64, p_hi: f64, count: usize) -> Result<EvalGrid> {
        if count == 0 || !(p_lo > 0.0 && p_lo <= p_hi && p_hi < 1.0) {
            return Err(Error::InvalidArgument("need 0 < p_lo <= p_hi < 1 and count >= 1"));
        }
        let mut points = alloc::vec::Vec::with_capacity(count);
        for i in 0..count {
            let p = if count == 1 {
                p_hi
            } else {
                p_lo + (p_hi - p_lo) * i as f64 / (count - 1) as f64
            };
            points.push(self.quantile_f(p)?);
        }
        points.dedup();
        let b = *points.last().unwrap();
        EvalGrid::new(points, b)
    }
}

impl Population for TruthModel {
    fn r(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.survival(t) * self.g(t) / self.mu
    }

    fn f_u_density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.density(t) * self.g(t) / self.mu
    }

    fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        -libm::expm1(-self.cum_hazard(t))
    }

    fn cum_hazard(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Exponential { rate } => rate * t,
            Family::Weibull { shape, scale } => libm::pow(t / scale, shape),
        }
    }

    fn s_a(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        1.0 - self.one_minus_s_a(t)
    }

    fn one_minus_s_a(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Exponential { rate } => -libm::expm1(-rate * t),
            Family::Weibull { .. } => (self.tabulated(&self.tables().s, t) / self.mu).min(1.0),
        }
    }

    fn k(&self, t: f64) -> f64 {
        self.s_a(t) * (1.0 + self.s_c(t))
    }

    fn q_density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.f_a(t) * (1.0 + self.s_c(t))
    }

    fn cum_hazard_a(&self, t: f64) -> f64 {
        match self.family {
            Family::Exponential { rate } => rate * t.max(0.0),
            Family::Weibull { .. } => -libm::log(self.s_a(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};

    fn models() -> [TruthModel; 4] {
        [
            TruthModel::default_scenario(),
            TruthModel::new(Family::Exponential { rate: 2.0 }, Censoring::None).unwrap(),
            TruthModel::new(Family::Weibull { shape: 1.5, scale: 2.0 }, Censoring::Exponential { rate: 0.3 })
                .unwrap(),
            TruthModel::new(Family::Weibull { shape: 1.0, scale: 1.0 }, Censoring::Exponential { rate: 0.5 })
                .unwrap(),
        ]
    }

    const TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-12 };

    #[test]
    fn rejects_bad_parameters() {
        assert!(TruthModel::new(Family::Exponential { rate: 0.0 }, Censoring::None).is_err());
        assert!(TruthModel::new(Family::Weibull { shape: 0.1, scale: 1.0 }, Censoring::None).is_err());
        assert!(TruthModel::new(Family::Exponential { rate: 1.0 }, Censoring::Exponential { rate: -1.0 }).is_err());
    }

    #[test]
    fn closed_forms_match_defining_integrals() {
        for m in models() {
            for &t in &[0.05, 0.3, 1.0, 2.2, 4.0] {
                let fu = integrate(|u| m.f_u_density(u), 0.0, t, TOL).unwrap();
                assert!((fu - m.f_u(t)).abs() < 1e-8, "Fu {t}");
                let q = integrate(|u| m.q_density(u), 0.0, t, TOL).unwrap();
                assert!((q - m.q(t)).abs() < 1e-8, "Q {t}");
                let h = integrate(|u| m.h_density(u), 0.0, t, TOL).unwrap();
                assert!((h - m.h(t)).abs() < 1e-8, "H {t}");
                let sa = integrate(|u| m.survival(u), t, t + 60.0 * m.mu(), TOL).unwrap() / m.mu();
                assert!((sa - m.s_a(t)).abs() < 1e-8, "S_A {t}");
            }
        }
    }

    #[test]
    fn exponential_weibull_agree_at_unit_shape() {
        let [e, _, _, w] = models();
        for &t in &[0.1, 0.7, 3.0] {
            assert!((e.f_u(t) - w.f_u(t)).abs() < 1e-10);
            assert!((e.h(t) - w.h(t)).abs() < 1e-10);
            assert!((e.s_a(t) - w.s_a(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn mass_balance_and_alpha() {
        for m in models() {
            let total = m.h(1e3 * m.mu());
            assert!((total - 1.0).abs() < 1e-9);
            assert_eq!(m.alpha(), 1.0);
            assert!(m.r(1e-9) < 1e-6);
        }
        let d = TruthModel::default_scenario();
        assert!((d.event_probability() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn quantiles_invert() {
        for m in models() {
            for &p in &[0.1, 0.5, 0.9, 0.999] {
                assert!((m.cdf(m.quantile_f(p).unwrap()) - p).abs() < 1e-12);
                assert!((m.h(m.quantile_h(p).unwrap()) - p).abs() < 1e-10);
            }
        }
        let g = TruthModel::default_scenario().quantile_grid(0.1, 0.9, 25).unwrap();
        assert_eq!(g.len(), 25);
        assert!((g.b() - core::f64::consts::LN_10).abs() < 1e-12);
    }
}
