use thiserror::Error;

pub type Result<T> = std::result::Result<T, EcsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EcsError {
    #[error("label list is empty")]
    EmptyLabels,

    #[error("label amplitude is not finite: {0}")]
    NonFiniteLabel(String),

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    /// A Cholesky pivot fell below the tolerance while rows remained, so the
    /// block states are linearly dependent at this block size.
    #[error("degenerate frame at row {row}: squared pivot {pivot_sq:e} below tolerance {tol:e}")]
    DegenerateFrame { row: usize, pivot_sq: f64, tol: f64 },

    #[error("normalization constant {0:e} is not positive")]
    NonPositiveNorm(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("overlap constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: tau({lo}) = {tau_lo:e}, tau({hi}) = {tau_hi:e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        tau_lo: f64,
        tau_hi: f64,
    },

    #[error("cutoff {cutoff} too small for amplitude {amplitude}: truncation leak {leak:e}")]
    CutoffTooSmall {
        cutoff: usize,
        amplitude: f64,
        leak: f64,
    },

    #[error("bad mode index {index} for {modes} modes")]
    BadModeIndex { index: usize, modes: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

impl EcsError {
    /// Short machine-readable tag, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            EcsError::EmptyLabels => "empty_labels",
            EcsError::NonFiniteLabel(_) => "non_finite_label",
            EcsError::InvalidGram(_) => "invalid_gram",
            EcsError::DegenerateFrame { .. } => "degenerate_frame",
            EcsError::NonPositiveNorm(_) => "non_positive_norm",
            EcsError::InvalidState(_) => "invalid_state",
            EcsError::InvalidPartition(_) => "invalid_partition",
            EcsError::InvalidDensity(_) => "invalid_density",
            EcsError::ConstraintViolation(_) => "constraint_violation",
            EcsError::InvalidBracket { .. } => "invalid_bracket",
            EcsError::NoSignChange { .. } => "no_sign_change",
            EcsError::CutoffTooSmall { .. } => "cutoff_too_small",
            EcsError::BadModeIndex { .. } => "bad_mode_index",
            EcsError::ShapeMismatch(_) => "shape_mismatch",
        }
    }
}
