use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad shapes, non-finite inputs or out-of-range arguments.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("non-finite value at collocation point {point}: {what}")]
    NonFinite { point: usize, what: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("initial-condition fit diverged at iteration {iteration} (loss = {loss})")]
    FitDiverged { iteration: usize, loss: f64 },

    #[error("integration blew up at step {step} (t = {t})")]
    Integration { step: usize, t: f64 },

    #[error("relative error undefined: reference field has zero norm")]
    UndefinedMetric,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::FitDiverged { .. } => 3,
            Error::Integration { .. } | Error::NonFinite { .. } => 4,
            Error::Io { .. } => 5,
            Error::Input(_) | Error::UndefinedMetric => 1,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
