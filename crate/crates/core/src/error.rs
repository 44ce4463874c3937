use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read image {path}: {source}")]
    Ingest {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate object: {0}")]
    DegenerateObject(String),

    #[error("radius undefined: {0}")]
    RadiusUndefined(String),

    #[error("no dominant angle: edge list is empty")]
    NoDominantAngle,

    #[error("degenerate error model: segment {segment} has s + R = 0")]
    DegenerateErrorModel { segment: usize },

    #[error("object placement failed after {attempts} attempts (achieved density {achieved:.4}, requested {requested:.4})")]
    Placement {
        attempts: usize,
        achieved: f64,
        requested: f64,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
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
