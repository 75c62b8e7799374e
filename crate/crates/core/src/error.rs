//! Error type shared by the whole engine.
//!
//! Every error carries a category that maps onto the CLI exit codes:
//! configuration problems, data problems (files, invariants), and numerical
//! aborts raised mid-run.

use thiserror::Error;

/// Coarse error category, used by front ends to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad configuration: unknown keys, out-of-range parameters.
    Config,
    /// Bad input data: parse failures, invariant violations, missing files.
    Data,
    /// The model itself failed: annihilated economy, unsupported temperature.
    Numerical,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Data => "data",
            ErrorCategory::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("data: {0}")]
    Data(String),

    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// An impact fraction reached -1 or below: output is wiped out and the
    /// run cannot continue.
    #[error("numerical: economy annihilated in {country} in {year} (impact fraction {impact})")]
    EconomyAnnihilated {
        country: String,
        year: i32,
        impact: f64,
    },

    #[error("numerical: {0}")]
    Numerical(String),

    /// A least-squares fit failed for one functional form; other forms carry on.
    #[error("fit did not converge for form {form}: {message}")]
    FitNonConvergence { form: String, message: String },
}

impl EngineError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            EngineError::Config(_) => ErrorCategory::Config,
            EngineError::Parse { .. } | EngineError::Data(_) | EngineError::Io { .. } => {
                ErrorCategory::Data
            }
            EngineError::EconomyAnnihilated { .. }
            | EngineError::Numerical(_)
            | EngineError::FitNonConvergence { .. } => ErrorCategory::Numerical,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        EngineError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, EngineError>;
