use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("invalid observation: {0}")]
    InvalidObservation(&'static str),

    #[error("dataset has no observations")]
    EmptyDataset,

    #[error("invalid model configuration: {0}")]
    Configuration(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("quadrature did not converge on [{lower}, {upper}]")]
    QuadratureNoConvergence { lower: f64, upper: f64 },

    #[error("non-finite integrand or influence value at t = {at}")]
    AssumptionViolation { at: f64 },

    #[error("evaluation window too wide: integral {value} exceeds cap {cap}")]
    WindowTooWide { value: f64, cap: f64 },

    #[error("non-finite residual at n = {n}, replication {rep} (seed {seed})")]
    NonFiniteResidual { n: usize, rep: usize, seed: u64 },
}
