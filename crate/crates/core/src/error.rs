use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or infeasible input: bad dimensions, NaN coordinates,
    /// too few points, unknown selectors.
    #[error("input error: {0}")]
    Input(String),

    /// A domain point sits on a puncture, where the punctured metrics are undefined.
    #[error("point on puncture: point {point} coincides with puncture {puncture}")]
    PointOnPuncture { point: usize, puncture: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
