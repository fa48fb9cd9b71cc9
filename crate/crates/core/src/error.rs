use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error taxonomy shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are structurally inconsistent (mismatched grids, bad config fields).
    #[error("configuration error: {0}")]
    Config(String),

    /// Input is degenerate for the requested computation (zero species-2 mass,
    /// renewal kernel concentrated at the origin).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The discretization scheme cannot take another step without driving the
    /// species-2 mass to zero or below.
    #[error("horizon exhausted at step {step}: species-2 mass {n2} cannot absorb loss {loss}")]
    HorizonExhausted { step: usize, n2: f64, loss: f64 },

    /// A kinetic-solution evaluation was requested at or beyond the solution horizon.
    #[error("time {t} is at or beyond the solution horizon {horizon}")]
    OutOfHorizon { t: f64, horizon: f64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
