use thiserror::Error;

/// Everything that can stop a validation run, with the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("schema error at `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("parameter `{field}` out of range: {reason}")]
    Range { field: String, reason: String },
    #[error("unknown builder `{name}` at `{field}` (known: {known})")]
    UnknownBuilder { field: String, name: String, known: String },
    #[error("cannot build the model: {0}")]
    Build(wedgelab::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for configuration problems, 3 when the model exceeds a capacity limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Build(wedgelab::Error::Capacity(_)) => 3,
            _ => 2,
        }
    }
}
