use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("descriptor is not finite: ({0}, {1})")]
    InvalidDescriptor(f64, f64),
    #[error("cell key out of bounds: policy {policy}, bin ({x_bin}, {y_bin})")]
    InvalidKey { policy: usize, x_bin: usize, y_bin: usize },
    #[error("archive is empty")]
    EmptyArchive,
    #[error("genotype has length {got}, expected {expected}")]
    InvalidGenotype { got: usize, expected: usize },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown policy id `{0}`")]
    UnknownPolicy(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("{key}: {message}")]
    ConfigKey { key: String, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported format version {0}")]
    Version(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
