use thiserror::Error;

use crate::model::{Arm, Covariates};

/// Errors raised by estimators, bounds and the data layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weighting function has no entry for w={w}, t={arm}")]
    MissingWeight { w: Covariates, arm: Arm },

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("treatment is degenerate: the {0} arm is empty")]
    DegenerateTreatment(Arm),

    #[error("no rows observed for covariate stratum w={0}")]
    EmptyStratum(Covariates),

    #[error("stratum w={w} has no rows in the {arm} arm")]
    EmptyArmInStratum { w: Covariates, arm: Arm },

    #[error("propensity score {score} at w={w} is outside (0, 1); set a clipping threshold")]
    ExtremePropensity { w: Covariates, score: f64 },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("covariate dimension {d} exceeds the enumeration limit {limit}")]
    TooLarge { d: usize, limit: usize },

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { field, reason: reason.into() }
    }
}
