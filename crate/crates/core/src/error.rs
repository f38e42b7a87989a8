//! Error type shared by all modules.

use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands live in different ambient spaces or have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A precondition on the input values was violated (non-Hermitian
    /// operator, singular gauge, non-invariant projector, invalid witness).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The requested computation would materialize more data than the
    /// configured dense cap allows.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The physical subspace fills the whole local space, so no parent
    /// Hamiltonian exists at this interaction length.
    #[error("not a proper subspace: {0}")]
    NotProperSubspace(String),

    /// A derived object could not be built within tolerance.
    #[error("construction failure: {0}")]
    ConstructionFailure(String),

    /// An eigensolver or factorization did not converge.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Tensor construction invariants were violated (wrong shapes, all-zero
    /// matrix family, bad parameters).
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    /// A document could not be parsed as the tensor wire format.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
