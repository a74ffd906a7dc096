use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ppm_core::Error),
    #[error("cell n={n} epsilon={epsilon}: {source}")]
    Cell {
        n: usize,
        epsilon: f64,
        #[source]
        source: ppm_core::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("records: {0}")]
    Records(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Records(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Records(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
