use std::path::Path;

/// Errors surfaced by the command-line layer. Each maps to a process exit
/// code: 1 for bad input or usage, 2 for a failed computation.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 1,
            CliError::Compute(_) => 2,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<lbrc_core::Error> for CliError {
    fn from(e: lbrc_core::Error) -> Self {
        use lbrc_core::Error as E;
        match e {
            E::QuadratureNoConvergence { .. } | E::AssumptionViolation { .. } | E::NonFiniteResidual { .. } => {
                CliError::Compute(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}
