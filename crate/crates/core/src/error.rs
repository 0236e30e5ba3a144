use thiserror::Error;

/// Errors raised by generators, measures and the experiment engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate noise: {0}")]
    DegenerateNoise(String),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("value {value} out of range: {reason}")]
    OutOfRange { value: f64, reason: String },

    #[error("no real root for the final noise component (discriminant {discriminant})")]
    NoRealRoot { discriminant: f64 },

    #[error("sample size {n} exceeds the cap of {cap}; subsample before scoring")]
    SizeCap { n: usize, cap: usize },

    #[error("unknown identifier: {0}")]
    UnknownId(String),

    #[error("measure `{0}` is a declared slot without an implementation")]
    Unimplemented(String),

    #[error("{}", match line { Some(l) => format!("parse error at line {l}: {message}"), None => format!("parse error: {message}") })]
    Parse {
        line: Option<usize>,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(invalid(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}
