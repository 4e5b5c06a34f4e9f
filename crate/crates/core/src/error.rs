use thiserror::Error;

/// Errors raised by the geometric pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter block or mapping is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// Two inputs that must share a resolution do not.
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A semantic label id has no entry in the layout mapping.
    #[error("label id {0} is not covered by the layout class mapping")]
    UnmappedLabel(u32),
    /// Plane heights cannot be estimated, so the layout cannot be rebuilt.
    #[error("layout is unreconstructable: {0}")]
    Unreconstructable(String),
    /// A reduction was requested over an empty set of samples.
    #[error("no valid samples for {0}")]
    EmptySet(&'static str),
    /// Pearson correlation is undefined for a constant series.
    #[error("correlation undefined: {0} has zero variance")]
    UndefinedCorrelation(&'static str),
    /// A file is readable but its contents are malformed.
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    /// The operating system refused a read or write.
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub(crate) fn format(path: &std::path::Path, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.display().to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_shape(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, found })
    }
}
