use thiserror::Error;

/// Errors raised by the verification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("mesh quality: {0}")]
    MeshQuality(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("target {target} is unreachable from the source")]
    Unreachable { target: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("inequality inapplicable: {0}")]
    Inapplicable(String),

    #[error("geodesic left the surface: {0}")]
    ChartExtension(String),

    #[error("map is not conformal (angle distortion {0:e})")]
    NonConformal(f64),

    #[error("degenerate distance function: {0}")]
    Degenerate(String),

    #[error("lift domain error at square {square}: {reason}")]
    LiftDomain { square: usize, reason: String },

    #[error("numerical lift error: {0}")]
    NumericalLift(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
