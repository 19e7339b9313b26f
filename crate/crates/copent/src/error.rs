use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] copent_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: ragged row, expected {expected} fields but found {found}")]
    RaggedRow { line: u64, expected: usize, found: usize },
    #[error("no data rows")]
    NoRows,
    #[error("not a SAS transport file: missing library header signature")]
    BadSignature,
    #[error("unsupported transport format: {0}")]
    Unsupported(String),
    #[error("malformed transport file: {0}")]
    Malformed(String),
    #[error("truncated observation record: {0} trailing bytes do not form a full record")]
    TruncatedRecord(usize),
    #[error("variable descriptors do not tile the observation record: {0}")]
    StrideMismatch(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("matrix: {0}")]
    Matrix(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
