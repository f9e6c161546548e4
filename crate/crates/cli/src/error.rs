use thiserror::Error;

/// Failures that end a command with exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] polymeasure::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// Re-anchors a single-line label parse error at a workspace position.
    pub fn relocate(e: polymeasure::Error, line: usize, col0: usize) -> CliError {
        match e {
            polymeasure::Error::Parse { column, message, .. } => {
                CliError::Parse { line, column: col0 + column - 1, message }
            }
            other => CliError::Parse { line, column: col0, message: other.to_string() },
        }
    }
}
