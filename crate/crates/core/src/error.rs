use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A process spec violates a validation rule. `path` is the JSON-style
    /// location of the offending field, e.g. `components[1].process.support`.
    #[error("invalid spec at `{path}`: {reason}")]
    InvalidSpec { path: String, reason: String },

    #[error("no unique stationary distribution: {0}")]
    NoStationaryDistribution(String),

    #[error("unsupported process: {0}")]
    UnsupportedProcess(String),

    #[error("exact enumeration needs {atoms} atoms, above the cap of {cap}")]
    ExplosionCap { atoms: u128, cap: u128 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// JSON could not be decoded into a spec; `path` locates the field.
    #[error("schema error at `{path}`: {reason}")]
    Schema { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn spec(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
