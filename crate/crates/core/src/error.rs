use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("column {name:?} has {got} entries but the dataset has {expected} rows")]
    ColumnLength { name: String, expected: usize, got: usize },
    #[error("column names must be non-empty")]
    EmptyName,
    #[error("duplicate column name {0:?}")]
    DuplicateName(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("column index {index} is out of bounds (dataset has {n_cols} columns, indices are 1-based)")]
    IndexOutOfBounds { index: usize, n_cols: usize },
    #[error("invalid column selector {0:?}")]
    InvalidSelector(String),
    #[error("column selection is empty")]
    EmptySelection,
    #[error("column {0:?} has no non-missing values to average")]
    AllMissing(String),
    #[error("no rows left after dropping rows with missing values")]
    NoRowsLeft,
    #[error("column {0:?} has missing entries; impute first")]
    MissingValues(String),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("need at least {needed} columns, got {got}")]
    TooFewColumns { needed: usize, got: usize },
    #[error("k must be >= 1")]
    ZeroK,
    #[error("k must be < number of rows (k = {k}, rows = {n})")]
    KTooLarge { k: usize, n: usize },
    #[error("point dimension must be >= 1")]
    ZeroDimension,
    #[error("jitter magnitude must be finite and non-negative, got {0}")]
    InvalidJitter(f64),
    #[error("point {index} has a zero k-th neighbour distance (duplicate points with jitter disabled)")]
    ZeroDistance { index: usize },
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("sequences have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("input is constant (zero spread)")]
    Constant,
    #[error("correlation matrix is not positive semi-definite")]
    NotPositiveSemiDefinite,
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("threshold must be positive and finite, got {0}")]
    InvalidThreshold(f64),
}
