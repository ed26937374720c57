use thiserror::Error;

/// Errors raised across the crate.
///
/// Scalars carried by variants are in their canonical text form (see
/// [`crate::Scalar::to_repr`]) so the type stays backend-independent.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive semidefinite: x·Ax = {value} for x = {witness:?}")]
    NotPsd { witness: Vec<String>, value: String },

    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("dimension {n} exceeds the supported cap {cap}")]
    DimensionTooLarge { n: usize, cap: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },

    #[error("tuple of dimension {n} must hold exactly {n} matrices, got {len}")]
    TupleLength { n: usize, len: usize },

    #[error("negative coefficient {0}")]
    NegativeCoefficient(String),

    #[error("non-finite or unparsable scalar {0:?}")]
    InvalidScalar(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("transversal search exhausted: {tuples} candidate tuples exceed the bound {bound}")]
    SearchExhausted { tuples: u128, bound: u128 },

    #[error("exact segment decomposition cannot be computed over the rationals; supply one to verify")]
    ExactDecompositionUnsupported,

    #[error("segment decomposition does not recombine to the ellipsoid matrix")]
    DecompositionMismatch,

    #[error("ellipsoid {index} is not contained in the orthogonal complement of the segment")]
    NotInOrthogonalComplement { index: usize },

    #[error("reference tuple has vanishing mixed discriminant")]
    ReferenceTupleDegenerate,

    #[error("atom {atom} slot {slot} has a zero vector")]
    ZeroAtomVector { atom: usize, slot: usize },

    #[error("weight {0} must be positive")]
    NonPositiveWeight(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
