use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// The matching map from beta to a trap spacing diverges as beta -> 1.
    #[error("beta = {beta} is too close to 1: matched level spacing diverges")]
    MatchDiverges { beta: f64 },

    #[error("{op} failed to converge after {iterations} iterations (last residual {residual:e})")]
    Convergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A sweep point failed; `index` is the grid position.
    #[error("grid point {index} (value {value}) failed: {source}")]
    GridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("integration step size underflow at t = {time:e} (h = {step:e})")]
    StepUnderflow { time: f64, step: f64 },

    #[error("numerical instability at step {step}: {reason}")]
    Instability { step: usize, reason: String },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("invalid spectrum: {0}")]
    Spectrum(String),

    #[error("curve has no knee: log-log curvature never exceeds {max_curvature:e}")]
    NoKnee { max_curvature: f64 },

    #[error("no fittable points (both spectra above the inclusion floor)")]
    NoFittablePoints,

    #[error("Kennard-Stepanov fit needs at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error(
        "fitted slope {slope:e} /eV is not positive: absorption and fluorescence look swapped"
    )]
    NegativeSlope { slope: f64 },

    #[error("fit quality too poor: r^2 = {r_squared:.6} < {threshold}")]
    PoorFit { r_squared: f64, threshold: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_grid_point(self, index: usize, value: f64) -> Self {
        Error::GridPoint {
            index,
            value,
            source: Box::new(self),
        }
    }
}
