use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fails its validity constraints (sign, range, length).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// User and antenna coincide; the spherical-wavefront channel is singular.
    #[error("zero propagation distance between user and antenna")]
    ZeroDistance,

    /// The requested target cannot be met by any admissible configuration.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The scenario itself is ill-posed (e.g. region too small for the array).
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
