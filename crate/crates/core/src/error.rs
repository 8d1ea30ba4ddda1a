use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("no embedded modulus for GF({p}^{e}); extension fields are supported up to order 512")]
    UnsupportedField { p: u64, e: u32 },
    #[error("field order {q} exceeds the configured limit {limit}")]
    FieldTooLarge { q: u64, limit: u64 },
    #[error("multiplicative inverse of zero")]
    InverseOfZero,
    #[error("element index {index} out of range for a field of order {q}")]
    ElementOutOfRange { index: u64, q: u64 },
    #[error("operands belong to different fields")]
    MismatchedFields,

    #[error("coordinate {index} out of range for {n} columns")]
    CoordinateOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix parse error at line {line}: {msg}")]
    MatrixParse { line: usize, msg: String },

    #[error("invalid code parameters: {0}")]
    InvalidCodeParams(String),
    #[error("parity-check matrix has rank {rank}, expected {expected}")]
    PcmRankMismatch { rank: usize, expected: usize },
    #[error("enumeration of {count} vectors exceeds the limit {limit}")]
    EnumerationLimit { count: u128, limit: u128 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{0}` carries parameters only; a concrete matrix is required")]
    ParamsOnlyPreset(String),

    #[error("matrix row {row} is not a dual codeword")]
    RowNotInDual { row: usize },
    #[error("erasure pattern of size {size} may be uncorrectable (minimum distance {d})")]
    ErasureTooLarge { size: usize, d: usize },
    #[error("l = {l} outside the valid range [1, {max}]")]
    LOutOfRange { l: usize, max: usize },
    #[error("search-space guard exceeded: {0}")]
    SearchGuard(String),
    #[error("no {l}-separating matrix with at most {max_rows} rows")]
    NoSolution { l: usize, max_rows: usize },

    #[error("invalid covering parameters: {0}")]
    InvalidCovering(String),
    #[error("covering table line {line}: {msg}")]
    CoveringTableParse { line: usize, msg: String },
    #[error("covering table entry ({n},{mu},{l}) -> {size} is below the Schoenheim lower bound {lower}")]
    ImplausibleCoveringEntry { n: usize, mu: usize, l: usize, size: u64, lower: u64 },

    #[error("columns {cols:?} of the parity-check matrix are linearly dependent")]
    DependentColumns { cols: Vec<usize> },
    #[error("constructed matrix failed verification: witness {witness:?}")]
    VerificationFailed { witness: Vec<usize> },

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
