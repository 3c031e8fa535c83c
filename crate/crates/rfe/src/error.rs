use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] rfe_core::Error),

    #[error("exact enumeration supports grids of 1 to 4096 points, got {0}")]
    Enumeration(usize),

    #[error("could not start worker pool: {0}")]
    Pool(String),

    #[error("{0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from bad user input rather than the
    /// environment.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Self::Core(_) | Self::Enumeration(_) | Self::Usage(_) | Self::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
