use thiserror::Error;

use crate::model::Recommendation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecoError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid quality distribution: {0}")]
    InvalidQuality(String),

    #[error("invalid type distribution: {0}")]
    InvalidDistribution(String),

    #[error("threshold out of (0,1): {0}")]
    ThresholdOutOfRange(f64),

    #[error("unreachable recommendation: {0:?} has zero probability")]
    UnreachableRecommendation(Recommendation),

    #[error("belief decomposition undefined: {0}")]
    DecompositionUndefined(&'static str),

    #[error("empty conditioning interval [{lo}, {hi}]")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("parameter undefined: {0}")]
    ParameterUndefined(&'static str),

    #[error("closed form inapplicable: {0}")]
    ClosedFormInapplicable(String),

    #[error("direction undefined: {0}")]
    DirectionUndefined(&'static str),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(&'static str),

    #[error("indeterminate configuration: {0}")]
    IndeterminateConfiguration(String),

    #[error("closed form {closed} and integral {integral} disagree")]
    IntegralMismatch { closed: f64, integral: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, RecoError>;
