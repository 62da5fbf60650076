//! Influence functions of the pooled estimators and diagnostics built on them.
//!
//! For subject `i` and `t` in the evaluation window,
//!
//! ```text
//! φᵢ(t)  = ∫_0^t K⁻²{I(aᵢ >= u) + I(ṽᵢ >= u)} dQ(u) - I(aᵢ <= t)/K(aᵢ) - δᵢ I(ṽᵢ <= t)/K(ṽᵢ)
//! ψ₁ᵢ(t) = ∫_0^t R⁻² I(aᵢ <= u <= yᵢ) dFᵘ(u) - δᵢ I(yᵢ <= t)/R(yᵢ)
//! ψ₂ᵢ(t) = ∫_0^t R⁻² {I(aᵢ > u) - S_A(u) - S_A(u) φᵢ(u)} dFᵘ(u)
//! ```
//!
//! In oracle mode the population functions come from a [`Population`]; in
//! plug-in mode every one of them is replaced by its estimate from a dataset.

mod lil;
mod oracle;
mod plugin;
mod residual;

pub use crate::truth::Population;
pub use lil::{integrability_diagnostic, lil_quantities, population_integrability, LilQuantities};
pub use oracle::OracleContext;
pub use plugin::{plugin_variance, PluginContext};
pub use residual::{
    representation_terms, residual_rn1, residual_rn2, residual_rn3, Representation, RepresentationReport,
    RepresentationTerms, Rn2Pair, SignConvention,
};

use crate::data::LbrcObservation;
use crate::Result;

/// Source of the functions `R`, `S_A`, `K`, `Q` and `Fᵘ`.
pub enum InfluenceContext<'a> {
    Oracle(OracleContext<'a>),
    Plugin(PluginContext),
}

impl InfluenceContext<'_> {
    pub fn phi(&self, obs: &LbrcObservation, t: f64) -> Result<f64> {
        match self {
            Self::Oracle(c) => c.phi(obs, t),
            Self::Plugin(c) => Ok(c.phi(obs, t)),
        }
    }

    pub fn psi_1(&self, obs: &LbrcObservation, t: f64) -> Result<f64> {
        match self {
            Self::Oracle(c) => c.psi_1(obs, t),
            Self::Plugin(c) => Ok(c.psi_1(obs, t)),
        }
    }

    pub fn psi_2(&self, obs: &LbrcObservation, t: f64) -> Result<f64> {
        match self {
            Self::Oracle(c) => c.psi_2(obs, t),
            Self::Plugin(c) => Ok(c.psi_2(obs, t)),
        }
    }
}

pub fn phi_i(obs: &LbrcObservation, t: f64, ctx: &InfluenceContext<'_>) -> Result<f64> {
    ctx.phi(obs, t)
}

pub fn psi_1i(obs: &LbrcObservation, t: f64, ctx: &InfluenceContext<'_>) -> Result<f64> {
    ctx.psi_1(obs, t)
}

pub fn psi_2i(obs: &LbrcObservation, t: f64, ctx: &InfluenceContext<'_>) -> Result<f64> {
    ctx.psi_2(obs, t)
}
