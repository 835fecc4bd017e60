use thiserror::Error;

use crate::registry::ParticleId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input vectors are linearly dependent (residual norm {residual:.3e} at vector {index})")]
    LinearDependence { index: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("subset of qubit positions is empty")]
    EmptySubset,

    #[error("qubit position {position} repeated or out of range for {qubits} qubits")]
    InvalidPosition { position: usize, qubits: usize },

    #[error("not a valid permutation: {0}")]
    InvalidPermutation(String),

    #[error("basis vectors are not orthonormal (worst deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("operator is not unitary (‖U†U − I‖ = {0:.3e})")]
    NonUnitary(f64),

    #[error("probe operator {index} is not unitary (‖C†C − I‖ = {deviation:.3e})")]
    NonUnitaryProbe { index: usize, deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("probabilities sum to {0}, not 1")]
    ProbabilityNotNormalized(f64),

    #[error("expected a {expected}-dimensional operator, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("expected a {expected}-qubit state, found {found} qubits")]
    WrongQubitCount { expected: usize, found: usize },

    #[error("unknown particle {0}")]
    UnknownParticle(ParticleId),

    #[error("particle {0} is not in transit")]
    NotInTransit(ParticleId),

    #[error("Bell-pair decoys need an even count, found {0}")]
    OddDecoyCount(usize),

    #[error("decoy particle {0} has no Bell partner")]
    UnpairedDecoy(ParticleId),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("dimension {0} exceeds the enumeration cap of 256")]
    TooLarge(usize),

    #[error("efficiency undefined: zero qubits")]
    ZeroQubits,

    #[error("efficiency undefined: zero denominator")]
    ZeroDenominator,

    #[error("malformed bit string: {0}")]
    BadBits(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
