use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("decomposition depth {requested} too deep for length {length} (max feasible is {max})")]
    Depth {
        requested: usize,
        length: usize,
        max: usize,
    },

    #[error("inconsistent structure: {0}")]
    Structure(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: expected {expected} {what}, found {found}", path.display())]
    CountMismatch {
        path: PathBuf,
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
