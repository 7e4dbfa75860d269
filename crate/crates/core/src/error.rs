use std::io;

/// Unified error type; the variant determines the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid argument or configuration value. Exit code 1.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A random structure could not be produced (e.g. a graph stayed
    /// disconnected past the attempt cap). Exit code 2.
    #[error("generation failure: {0}")]
    Generation(String),

    /// An iterative numerical routine failed to converge. Exit code 2.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Filesystem failure, annotated with the path involved. Exit code 3.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for this error class: 1 parameter, 2 generation or
    /// numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) => 1,
            Error::Generation(_) | Error::Numerical(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(Error::Parameter("x".into()).exit_code(), 1);
        assert_eq!(Error::Generation("x".into()).exit_code(), 2);
        assert_eq!(Error::Numerical("x".into()).exit_code(), 2);
        let e = Error::io("f.csv", io::Error::new(io::ErrorKind::NotFound, "gone"));
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn io_error_mentions_path() {
        let e = Error::io("out/data.csv", io::Error::new(io::ErrorKind::NotFound, "gone"));
        assert!(e.to_string().contains("out/data.csv"));
    }
}
