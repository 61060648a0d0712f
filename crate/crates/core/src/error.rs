use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the numerical routines.
///
/// Every variant carries a stable machine-readable code (see [`Error::code`])
/// that the command-line driver writes into its reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("multi-index of length {got} does not match block dimensions summing to {expected}")]
    BlockMismatch { expected: usize, got: usize },

    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("window function is identically zero")]
    ZeroWindow,

    #[error("{0:?} is not a permutation of 1..={len}", len = .0.len())]
    BadPermutation(Vec<usize>),

    #[error("lattice tail not negligible: boundary summand {summand:e} exceeds {tolerance:e}")]
    TailNotNegligible { summand: f64, tolerance: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::BlockMismatch { .. } => "E_BLOCK_MISMATCH",
            Error::DegreeCap { .. } => "E_DEGREE_CAP",
            Error::DimMismatch { .. } => "E_DIM_MISMATCH",
            Error::ZeroWindow => "E_ZERO_WINDOW",
            Error::BadPermutation(_) => "E_BAD_PERMUTATION",
            Error::TailNotNegligible { .. } => "E_TAIL_NOT_NEGLIGIBLE",
            Error::DegenerateFit(_) => "E_DEGENERATE_FIT",
            Error::DegenerateSamples(_) => "E_DEGENERATE_SAMPLES",
            Error::InvalidInput(_) => "E_INVALID_INPUT",
        }
    }

    /// Whether the error reflects an unusable request rather than a
    /// numerical outcome of a well-posed one.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::TailNotNegligible { .. } | Error::DegenerateFit(_) | Error::DegenerateSamples(_)
        )
    }
}

/// Non-fatal diagnostics attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The largest coefficient magnitude on the top degree shell exceeds the
    /// tolerance, so the truncation (or the quadrature) is too coarse.
    QuadratureUnderResolved { tail: f64, tolerance: f64 },
}

impl Warning {
    pub fn code(&self) -> &'static str {
        match self {
            Warning::QuadratureUnderResolved { .. } => "W_QUADRATURE_UNDER_RESOLVED",
        }
    }
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::QuadratureUnderResolved { tail, tolerance } => write!(
                f,
                "top-degree coefficient {tail:e} exceeds tolerance {tolerance:e}"
            ),
        }
    }
}
