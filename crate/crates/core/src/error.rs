use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("degenerate geometry: transmitter and receiver coincide at t = {t} s")]
    DegenerateGeometry { t: f64 },

    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("x = {x} lies on the pole set {{q*pi}}")]
    DomainX { x: f64 },

    #[error("c1 must be positive, got {0}")]
    NonPositiveC1(f64),

    #[error(
        "path-gain model invalid over the burst: distance {distance} m is below d_ref = {d_ref} m"
    )]
    ValidityViolation { distance: f64, d_ref: f64 },

    #[error("affine weight is not positive at packet {k}: b + a*kT = {value}")]
    PositivityViolation { k: usize, value: f64 },

    #[error("least-squares fit needs at least two distinct sample times")]
    DegenerateSamples,

    #[error("antenna pattern has no grid points")]
    EmptyPattern,

    #[error("malformed pattern row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("azimuth grid is not strictly increasing at row {line}")]
    NonMonotonicAzimuth { line: usize },

    #[error("invalid pathloss model: {0}")]
    InvalidModel(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
