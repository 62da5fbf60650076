//! Remainders of the i.i.d. representations.
//!
//! With `ψ̄ = n⁻¹ Σ (ψ₁ᵢ + ψ₂ᵢ)` and `φ̄ = n⁻¹ Σ φᵢ`,
//!
//! ```text
//! R_{n1} = Λ̃ - Λ + ψ̄
//! R_{n2} = F̃ₙ - F ∓ (1 - F) ψ̄
//! R_{n3} = S̃_A - S_A - S_A φ̄
//! ```
//!
//! The first-order expansion `F̃ₙ - F ≈ (1 - F)(Λ̃ - Λ)` points at the `+`
//! sign for `R_{n2}` ([`SignConvention::Minus`] below, because the linear
//! term is `-(1 - F) ψ̄`); both are computed.

use alloc::vec::Vec;

use crate::data::{Dataset, EvalGrid};
use crate::estimators::EstimatorBundle;
use crate::influence::OracleContext;
use crate::{Error, Result};

/// Sign of the linear term in `F̃ₙ - F = ±(1 - F) ψ̄ + R_{n2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignConvention {
    /// `F̃ₙ - F = -(1 - F) ψ̄ + R_{n2}`.
    Minus,
    /// `F̃ₙ - F = +(1 - F) ψ̄ + R_{n2}`.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Rn1,
    Rn2(SignConvention),
    Rn3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationReport {
    pub which: Representation,
    pub grid: EvalGrid,
    /// The linear term at each grid point.
    pub influence_mean: Vec<f64>,
    pub residuals: Vec<f64>,
    pub residual_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rn2Pair {
    pub minus: RepresentationReport,
    pub plus: RepresentationReport,
}

/// Influence averages and estimator errors at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationTerms {
    pub phi_bar: Vec<f64>,
    pub psi_bar: Vec<f64>,
    pub lambda_error: Vec<f64>,
    pub f_error: Vec<f64>,
    pub s_a_error: Vec<f64>,
    pub one_minus_f: Vec<f64>,
    pub s_a: Vec<f64>,
}

pub fn representation_terms(
    fit: &EstimatorBundle,
    d: &Dataset,
    ctx: &OracleContext<'_>,
    grid: &EvalGrid,
) -> Result<RepresentationTerms> {
    let [phi_bar, psi1, psi2] = ctx.influence_means(d, grid)?;
    let pop = ctx.population();
    let pts = grid.points();
    Ok(RepresentationTerms {
        phi_bar,
        psi_bar: psi1.iter().zip(&psi2).map(|(a, b)| a + b).collect(),
        lambda_error: pts.iter().map(|&t| fit.lambda_tilde.eval_at(t) - pop.cum_hazard(t)).collect(),
        f_error: pts.iter().map(|&t| fit.f_tilde.eval_at(t) - pop.cdf(t)).collect(),
        s_a_error: pts.iter().map(|&t| fit.s_a_tilde.eval_at(t) - pop.s_a(t)).collect(),
        one_minus_f: pts.iter().map(|&t| 1.0 - pop.cdf(t)).collect(),
        s_a: pts.iter().map(|&t| pop.s_a(t)).collect(),
    })
}

impl RepresentationTerms {
    pub fn report(&self, which: Representation, grid: &EvalGrid) -> RepresentationReport {
        let m = self.phi_bar.len();
        let influence_mean: Vec<f64> = (0..m)
            .map(|j| match which {
                Representation::Rn1 => -self.psi_bar[j],
                Representation::Rn2(SignConvention::Minus) => -self.one_minus_f[j] * self.psi_bar[j],
                Representation::Rn2(SignConvention::Plus) => self.one_minus_f[j] * self.psi_bar[j],
                Representation::Rn3 => self.s_a[j] * self.phi_bar[j],
            })
            .collect();
        let error = match which {
            Representation::Rn1 => &self.lambda_error,
            Representation::Rn2(_) => &self.f_error,
            Representation::Rn3 => &self.s_a_error,
        };
        let residuals: Vec<f64> = error.iter().zip(&influence_mean).map(|(e, l)| e - l).collect();
        let residual_sup = residuals.iter().fold(0.0f64, |s, r| s.max(libm::fabs(*r)));
        RepresentationReport { which, grid: grid.clone(), influence_mean, residuals, residual_sup }
    }
}

fn terms(d: &Dataset, ctx: &OracleContext<'_>, grid: &EvalGrid) -> Result<RepresentationTerms> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("evaluation grid is empty"));
    }
    representation_terms(&EstimatorBundle::fit(d), d, ctx, grid)
}

pub fn residual_rn1(d: &Dataset, ctx: &OracleContext<'_>, grid: &EvalGrid) -> Result<RepresentationReport> {
    Ok(terms(d, ctx, grid)?.report(Representation::Rn1, grid))
}

pub fn residual_rn2(d: &Dataset, ctx: &OracleContext<'_>, grid: &EvalGrid) -> Result<Rn2Pair> {
    let t = terms(d, ctx, grid)?;
    Ok(Rn2Pair {
        minus: t.report(Representation::Rn2(SignConvention::Minus), grid),
        plus: t.report(Representation::Rn2(SignConvention::Plus), grid),
    })
}

pub fn residual_rn3(d: &Dataset, ctx: &OracleContext<'_>, grid: &EvalGrid) -> Result<RepresentationReport> {
    Ok(terms(d, ctx, grid)?.report(Representation::Rn3, grid))
}
