use thiserror::Error;

/// Errors raised by curve construction, Frenet estimation and helix analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("wrong dimension: operation requires n = {required}, curve has n = {found}")]
    WrongDimension { required: usize, found: usize },

    #[error("curve is not regular: speed {speed:.3e} at parameter {at}")]
    NotRegular { at: f64, speed: f64 },

    #[error("tangent is not timelike at parameter {at}: <a',a'> = {value:.3e}")]
    NotTimelike { at: f64, value: f64 },

    #[error("curve is not unit speed: max |speed - 1| = {deviation:.3e}")]
    NotUnitSpeed { deviation: f64 },

    #[error("degenerate frame: curvature k{index} vanishes on a sub-interval starting at s = {at}")]
    DegenerateFrame { index: usize, at: f64 },

    #[error("degenerate curvature: k{index} falls below threshold on {count} nodes (first at s = {at})")]
    DegenerateCurvature { index: usize, count: usize, at: f64 },

    #[error("insufficient samples: {found} evaluable nodes, need at least {required}")]
    InsufficientSamples { found: usize, required: usize },

    #[error("not a helix: axis dispersion {dispersion:.3e} exceeds {threshold:.3e}")]
    NotAHelix { dispersion: f64, threshold: f64 },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("profile is not orthogonal to the axis: max |<gamma, U>| = {deviation:.3e}")]
    ProfileNotOrthogonal { deviation: f64 },

    #[error("profile is not unit speed: max |speed - 1| = {deviation:.3e}")]
    ProfileNotUnitSpeed { deviation: f64 },

    #[error("bad curvature profile: k{index} vanishes near s = {at}")]
    BadProfile { index: usize, at: f64 },

    #[error("frame drift exceeded: orthonormality defect {defect:.3e} at s = {at}")]
    FrameDriftExceeded { at: f64, defect: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
