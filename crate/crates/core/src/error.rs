use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} outside grid range [{min}, {max}]")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },

    #[error("u = {u} outside the window [-{half}, +{half}]")]
    OutsideWindow { u: f64, half: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerics error: {0}")]
    Numerics(String),

    #[error("grid too small for theorem checks: need |index_min| >= 4 and index_max >= 4, got [{min}, {max}]")]
    GridTooSmall { min: i64, max: i64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerics(_) => 3,
            Error::Io(_) | Error::Json(_) => 3,
            _ => 2,
        }
    }
}
