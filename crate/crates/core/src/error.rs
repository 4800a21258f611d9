use thiserror::Error;

/// Errors raised by the numerical and structural routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),

    #[error("Gauss-Bonnet condition violated: degree deficit {deficit}")]
    GaussBonnet { deficit: f64 },

    #[error("scale constant must be nonzero")]
    ZeroScale,

    #[error("point coincides with cone point {index} (exponent {exponent})")]
    AtConePoint { index: usize, exponent: f64 },

    #[error("cone point index {index} out of range (have {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path segment {segment} passes within {distance:e} of cone point {index} (clearance {clearance:e})")]
    Clearance {
        segment: usize,
        index: usize,
        distance: f64,
        clearance: f64,
    },

    #[error("quadrature did not converge within refinement depth {max_depth} (error estimate {error:e})")]
    NonConvergence { max_depth: u32, error: f64 },

    #[error("integral diverges at cone point {index}: alpha = {alpha} is not positive")]
    Divergent { index: usize, alpha: f64 },

    #[error("loop is not closed")]
    OpenLoop,

    #[error("monodromy probe system is singular")]
    SingularProbes,

    #[error("resonance obstruction at m = {m}: R_m = {remainder:e} is nonzero")]
    ResonanceObstruction { m: usize, remainder: f64 },

    #[error("invalid series input: {0}")]
    InvalidSeries(String),

    #[error("derivative vanishes at the evaluation point; map is not locally univalent")]
    NotUnivalent,

    #[error("normal form fit failed: residual {residual:e} exceeds {limit:e}")]
    FitFailure { residual: f64, limit: f64 },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid prevertex configuration: {0}")]
    InvalidPrevertices(String),

    #[error("parameter solver did not converge after {iterations} iterations (mismatch {mismatch:e})")]
    SolverNonConvergence { iterations: usize, mismatch: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of an iterative or adaptive numerical method, as
    /// opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SolverNonConvergence { .. }
                | Error::FitFailure { .. }
                | Error::ResonanceObstruction { .. }
                | Error::NotUnivalent
                | Error::SingularProbes
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
