use thiserror::Error;

/// Failure modes shared across the crate.
///
/// Construction errors (`InvalidGridSpec`, `SingularRay`, `NotNormalizable`)
/// reject inputs that would silently break invariants downstream; runtime
/// errors (`DenseCapExceeded`, `TruncationInsufficient`, `TailMass`) guard the
/// resource and accuracy contracts of the ensemble machinery.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid grid specification: {0}")]
    InvalidGridSpec(String),

    #[error("momentum ray lies on the negative z-axis, where the spinor section is singular")]
    SingularRay,

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("profile has no mass to normalize (sum of w*Z vanishes)")]
    NotNormalizable,

    #[error("coherent truncation drops tail mass {dropped:.3e} above tolerance {tol:.1e}; raise n_max or shrink alpha")]
    TailMass { dropped: f64, tol: f64 },

    #[error("dense ensemble dimension {dim} exceeds cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("truncation insufficient: operation needs n_max >= {needed}, state has n_max = {n_max}")]
    TruncationInsufficient { needed: usize, n_max: usize },

    #[error("permanent order {m} exceeds supported cap {cap}")]
    PermanentTooLarge { m: usize, cap: usize },

    #[error("group element incompatible with this operation: {0}")]
    IncompatibleElement(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
