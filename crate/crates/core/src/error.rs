use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have at least one row")]
    Empty,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("malformed matrix exchange data: {0}")]
    Malformed(String),

    #[error("operator is not hermitian (max |X - X^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace must be one, got {trace}")]
    TraceNotOne { trace: f64 },

    #[error("effect spectrum [{min}, {max}] leaves [0, 1]")]
    SpectrumOutOfRange { min: f64, max: f64 },

    #[error("probability {value} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("trace has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("all eigenvalues fall below the rank cutoff")]
    DegenerateSupport,

    #[error("factor dimensions multiply to {product}, operator has dimension {dim}")]
    Factorization { product: usize, dim: usize },

    #[error("subsystem index {index} out of range for {count} factors")]
    SubsystemIndex { index: usize, count: usize },

    #[error("states are not orthogonal (overlap Tr(X1 X2) = {overlap:e})")]
    NotOrthogonal { overlap: f64 },

    #[error("vector norm {norm} is not one")]
    NotNormalized { norm: f64 },

    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("coherence {0} outside [0, 1]")]
    CoherenceOutOfRange(f64),

    #[error("coherent family members require pure branch states")]
    CoherenceRequiresPure,

    #[error("state is not a member of the superposition set (block residuals {kernel1:e}, {kernel2:e})")]
    NotMember { kernel1: f64, kernel2: f64 },

    #[error("channel layout needs at least two channels, got {0}")]
    TooFewChannels(usize),

    #[error("channel {index} out of range for {count} channels")]
    ChannelIndex { index: usize, count: usize },

    #[error("channel {0} used twice")]
    ChannelCollision(usize),

    #[error("pointer pair on channel {channel} is not orthonormal (defect {defect:e})")]
    PointersNotOrthonormal { channel: usize, defect: f64 },

    #[error("supports of X1 and X2 miss {missing} dimensions of the object space")]
    SupportDeficiency { missing: usize },

    #[error("map is not an isometry (max |V^dagger V - I| = {defect:e})")]
    NotIsometry { defect: f64 },

    #[error("reduced states on channel {channel} are not orthogonal (overlap {overlap:e})")]
    ChannelNotDiscriminating { channel: usize, overlap: f64 },

    #[error("{count} read channels exceed the sampling limit of {limit}")]
    TooManyChannels { count: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
