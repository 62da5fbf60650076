//! Iterated-logarithm scale `d(t) = ∫ dFᵘ / R²` and the integrability
//! diagnostic `∫ dFᵘ / R³`.
//!
//! When `R(u)` vanishes linearly at the left end of the support both
//! integrals diverge there, so they are taken from an explicit `lower` limit
//! (normally the left edge of the evaluation window).

use alloc::vec::Vec;

use crate::data::EvalGrid;
use crate::influence::InfluenceContext;
use crate::quadrature::{integrate, Tolerance};
use crate::truth::Population;
use crate::{Error, Result};

const TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-13 };

#[derive(Debug, Clone, PartialEq)]
pub struct LilQuantities {
    pub d: Vec<f64>,
    /// `v(t) = [(1 - F(t)) d(t)]^{1/2}`.
    pub v: Vec<f64>,
    /// `v(t) = (1 - F(t)) d(t)^{1/2}`.
    pub v_squared_weight: Vec<f64>,
}

/// `d(t) = ∫_{(lower, t]} dFᵘ / R²` and both versions of `v(t)` on the grid.
/// Grid points at or below `lower` get `d = 0`.
pub fn lil_quantities(ctx: &InfluenceContext<'_>, grid: &EvalGrid, lower: f64) -> Result<LilQuantities> {
    let mut d = Vec::with_capacity(grid.len());
    let cdf: Vec<f64> = match ctx {
        InfluenceContext::Oracle(c) => {
            let pop = c.population();
            let mut acc = 0.0;
            let mut from = lower;
            for &t in grid.points() {
                if t > from {
                    acc += integrate(
                        |u| {
                            let r = pop.r(u);
                            pop.f_u_density(u) / (r * r)
                        },
                        from,
                        t,
                        TOL,
                    )?;
                    from = t;
                }
                d.push(acc);
            }
            grid.points().iter().map(|&t| pop.cdf(t)).collect()
        }
        InfluenceContext::Plugin(c) => {
            let fit = c.fit();
            let n = fit.n() as f64;
            for &t in grid.points() {
                let s: f64 = fit
                    .empirical
                    .event_points()
                    .iter()
                    .filter(|p| p.time > lower && p.time <= t)
                    .map(|p| {
                        let r = fit.r_tilde.eval_at(p.time).max(1.0 / n);
                        p.events as f64 / n / (r * r)
                    })
                    .sum();
                d.push(s);
            }
            grid.points().iter().map(|&t| fit.f_tilde.eval_at(t)).collect()
        }
    };
    let v = d.iter().zip(&cdf).map(|(d, f)| libm::sqrt((1.0 - f).max(0.0) * d)).collect();
    let v_squared_weight = d.iter().zip(&cdf).map(|(d, f)| (1.0 - f).max(0.0) * libm::sqrt(*d)).collect();
    Ok(LilQuantities { d, v, v_squared_weight })
}

/// `∫_{(lower, b]} dFᵘ / R³`. Values above `cap`, or an integral that fails to
/// converge, are reported as [`Error::WindowTooWide`].
pub fn integrability_diagnostic(ctx: &InfluenceContext<'_>, lower: f64, b: f64, cap: f64) -> Result<f64> {
    if !(b > lower) || !lower.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument("diagnostic needs finite lower < b"));
    }
    let value = match ctx {
        InfluenceContext::Oracle(c) => return population_integrability(c.population(), lower, b, cap),
        InfluenceContext::Plugin(c) => {
            let fit = c.fit();
            let n = fit.n() as f64;
            fit.empirical
                .event_points()
                .iter()
                .filter(|p| p.time > lower && p.time <= b)
                .map(|p| {
                    let r = fit.r_tilde.eval_at(p.time).max(1.0 / n);
                    p.events as f64 / n / (r * r * r)
                })
                .sum()
        }
    };
    capped(value, cap)
}

/// The population form of [`integrability_diagnostic`], usable before any
/// influence tables are built.
pub fn population_integrability(pop: &dyn Population, lower: f64, b: f64, cap: f64) -> Result<f64> {
    if !(b > lower) || !lower.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument("diagnostic needs finite lower < b"));
    }
    let integrand = |u: f64| {
        let r = pop.r(u);
        pop.f_u_density(u) / (r * r * r)
    };
    let value = match integrate(integrand, lower, b, TOL) {
        Ok(v) => v,
        Err(Error::QuadratureNoConvergence { .. }) | Err(Error::AssumptionViolation { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    capped(value, cap)
}

fn capped(value: f64, cap: f64) -> Result<f64> {
    if !(value <= cap) {
        return Err(Error::WindowTooWide { value, cap });
    }
    Ok(value)
}
