//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by operator and state constructors and operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions of the operands do not match.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An input violates a structural contract (hermiticity, trace, label, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// Conditioning on a measurement branch of (near-)zero probability.
    #[error("zero-probability branch: probability {probability:.3e} is below floor {floor:.3e}")]
    ZeroProbabilityBranch { probability: f64, floor: f64 },

    /// Operator on the doubled space does not commute with V and V†.
    #[error("operator is not a lift: max commutator violation {0:.3e}")]
    NotLiftable(f64),

    /// Candidate antilinear Hamiltonian term fails the admissibility condition.
    #[error("inadmissible antilinear term: max deviation {0:.3e} from (iH₂)† = -iH₂")]
    InadmissibleTerm(f64),

    /// Eigendecomposition failed to converge.
    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),
}
