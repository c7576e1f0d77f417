use thiserror::Error;

/// Errors reported by state, operator and algorithm constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("state norm {norm} deviates from 1 by more than {tol}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("dense operators are limited to dimension {max}, got {got}")]
    CapabilityExceeded { got: usize, max: usize },

    #[error("matrix is not unitary: max |M^H M - I| entry is {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("selective operator acts trivially on the initial state (theta = {theta:.3e})")]
    TrivialOracle { theta: f64 },

    #[error("rotation angle must lie strictly inside (0, 2*pi), got {0}")]
    InvalidRotationAngle(f64),

    #[error("query prediction diverges: effective rotation weight {0:.3e} vanishes")]
    DivergentQueryCount(f64),

    #[error("noise bound {0} leaves no amplification guarantee (kappa_bar <= 1)")]
    NoiseTooLarge(f64),

    #[error("recursion query count overflows u64 at level {0}")]
    QueryCountOverflow(u32),

    #[error("empty target set")]
    EmptyTargetSet,

    #[error("target set must leave at least one unmarked item ({marked} of {dim} marked)")]
    AllItemsMarked { marked: usize, dim: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
