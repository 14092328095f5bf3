use thiserror::Error;

/// Precondition and domain failures. Degenerate denominators are not errors;
/// they surface as [`crate::Validity::Undefined`] values instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("label {0} is not in the declared label set")]
    LabelOutsideSet(u32),
    #[error("label set must contain at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("need at least {need} observations, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("input outside the metric's domain: {0}")]
    Domain(String),
    #[error("non-finite input value")]
    NonFinite,
    #[error("unknown metric id `{0}`")]
    UnknownMetric(String),
    #[error("parameter `{key}` is not declared for metric `{metric}`")]
    UnknownParam { metric: String, key: String },
    #[error("formula family `{family}` is not registered for metric `{metric}`")]
    UnknownFamily { metric: String, family: String },
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("singular or rank-deficient design: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, MetricError>;
