use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside the validity range [{min}, {max}] of model `{model}`")]
    OutOfValidityRange {
        model: String,
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("model `{model}` produced a non-physical index {index} at {wavelength_nm} nm")]
    NonPhysicalIndex {
        model: String,
        wavelength_nm: f64,
        index: f64,
    },
    #[error("no quasi-phase-matching solution: intrinsic mismatch {mismatch} rad/m is not positive")]
    NoPhaseMatch { mismatch: f64 },
    #[error("no root of the phase mismatch inside [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },
    #[error("energy conservation violated: {0}")]
    EnergyConservation(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("refractive index `{0}` is not set")]
    MissingDispersion(&'static str),
    #[error("mixing angle routes disagree: {from_coupling} rad vs {from_power} rad")]
    AngleMismatch { from_coupling: f64, from_power: f64 },
    #[error("CAR is undefined at zero pump power")]
    UndefinedAtZeroPump,
    #[error("event streams have different durations ({0} s vs {1} s)")]
    MismatchedDuration(f64, f64),
    #[error("histogram holds no counts")]
    EmptyHistogram,
    #[error("histogram needs at least {needed} bins, got {got}")]
    TooFewBins { needed: usize, got: usize },
    #[error("ITU channel C{0} is outside the supported grid")]
    UnsupportedChannel(i32),
    #[error("shift of {0} GHz is not a multiple of the 100 GHz grid spacing")]
    ShiftNotOnGrid(f64),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("unknown sweep variable `{0}`")]
    UnknownVariable(String),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
