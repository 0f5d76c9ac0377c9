use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("flux solver did not converge after {iterations} iterations (last update {update:e})")]
    NonConvergence { iterations: usize, update: f64 },

    #[error("no voltage pulses above threshold")]
    NoPulses,

    #[error("switch-time argument {argument} outside [-1, 1]: the SQUID never reaches the node")]
    OutOfRange { argument: f64 },

    #[error("record spans {periods} drive periods, which is not an integer")]
    NonCommensurate { periods: f64 },

    #[error("k_max = {k_max} exceeds usable bandwidth (highest harmonic {limit})")]
    BandwidthExceeded { k_max: usize, limit: usize },

    #[error("spectra disagree on {0}")]
    MixedConfig(&'static str),

    #[error("{required} bin simulations exceed the budget of {cap}")]
    BudgetExceeded { required: usize, cap: usize },

    #[error("bin {index} (zeta = {center}): {source}")]
    Bin {
        index: usize,
        center: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("unknown scenario `{given}`; valid ids: {valid}")]
    UnknownScenario { given: String, valid: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "ValidationError",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::NoPulses => "NoPulses",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::NonCommensurate { .. } => "NonCommensurate",
            Error::BandwidthExceeded { .. } => "BandwidthExceeded",
            Error::MixedConfig(_) => "MixedConfig",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::Bin { source, .. } => source.kind(),
            Error::Io { .. } => "IoError",
            Error::Parse { .. } => "ParseError",
            Error::UnknownScenario { .. } => "UnknownScenario",
        }
    }
}
