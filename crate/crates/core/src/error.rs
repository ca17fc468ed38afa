use crate::symbols::Discretization;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("frequency component {0} lies outside [-pi/2, 3pi/2)")]
    FrequencyOutOfRange(f64),

    #[error("{op} is not available for {disc}")]
    Unsupported { op: &'static str, disc: Discretization },

    #[error("{op} is not available for scheme {scheme}")]
    UnsupportedScheme { op: &'static str, scheme: String },

    #[error("singular {what} at theta = ({theta1:.6}, {theta2:.6})")]
    SingularSymbol { what: &'static str, theta1: f64, theta2: f64 },

    #[error("sample count {0} must be a positive multiple of 4")]
    BadSamples(usize),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameter grid is empty")]
    EmptyGrid,

    #[error("grid size mismatch: expected n = {expected}, got n = {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("grid size {0} is not supported (need a power of two, at least 2)")]
    BadGridSize(usize),

    #[error("unknown table id `{0}`")]
    UnknownTable(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
