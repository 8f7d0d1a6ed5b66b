//! Error type shared across the library.

use std::path::PathBuf;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building spectra, missions, or rates.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition (negative energy,
    /// empty band, zero mass where positive is required, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// A data file could not be parsed; carries the 1-based line number.
    #[error("parse error in {path} line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A column header declared a unit outside the supported set.
    #[error("unsupported unit {unit:?} in {path}")]
    Unit { path: PathBuf, unit: String },

    /// A required data file is absent and no fallback was requested.
    #[error("missing data file: {0}")]
    MissingData(PathBuf),

    /// Adaptive quadrature failed to reach the requested tolerance; the
    /// partial value and its error estimate are preserved for diagnostics.
    #[error("quadrature failed to converge ({what}): value {value:e} ± {error:e}")]
    Quadrature {
        what: String,
        value: f64,
        error: f64,
    },

    /// The requested background has no rate of the requested kind
    /// (e.g. dust has no cross-section-integral form).
    #[error("unsupported background for this operation: {0}")]
    UnsupportedBackground(String),

    /// Invalid configuration (unknown mission name, bad TOML, …).
    #[error("config error: {0}")]
    Config(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Convenience constructor for [`Error::Domain`].
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Convenience constructor for [`Error::Config`].
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
