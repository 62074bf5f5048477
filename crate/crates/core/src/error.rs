use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The leading fiber coefficient is too small relative to the others; the
    /// caller should switch projection.
    #[error("degenerate fiber: leading coefficient {lead:e} below threshold {threshold:e}")]
    DegenerateFiber { lead: f64, threshold: f64 },

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("shape operator spectrum has unexpected structure: {0}")]
    SpectrumStructure(String),

    #[error("branch continuation failed: {0}")]
    BranchContinuation(String),

    #[error("value outside domain: {0}")]
    Domain(String),

    /// No smooth plane curve has this total absolute curvature.
    #[error("total curvature {total} lies in the gap ({upper}, {next_lower}) between degrees {degree} and {next}", next = .degree + 1)]
    Gap {
        total: f64,
        degree: u32,
        upper: f64,
        next_lower: f64,
    },

    #[error("invalid Betti vector: {0}")]
    InvalidBetti(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Whether the failure is caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Input(_)
                | Error::DimensionMismatch { .. }
                | Error::Domain(_)
                | Error::Gap { .. }
                | Error::InvalidBetti(_)
                | Error::Unsupported(_)
        )
    }
}
