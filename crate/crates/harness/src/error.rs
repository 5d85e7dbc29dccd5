use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{0}` given more than once")]
    DuplicateKey(String),
    #[error("missing required config key `{0}`")]
    MissingKey(&'static str),
    #[error("config key `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Core(#[from] edamcc::Error),
    #[error("no run records to report on")]
    EmptyRecords,
    #[error("{0}")]
    Incompatible(String),
    #[error("{failed} of {total} runs failed")]
    RunsFailed { failed: usize, total: usize },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    pub(crate) fn invalid(key: &str, message: impl Into<String>) -> Self {
        HarnessError::InvalidValue {
            key: key.to_owned(),
            message: message.into(),
        }
    }

    /// Short diagnostic category, printed before the message.
    pub fn category(&self) -> &'static str {
        match self {
            HarnessError::Syntax { .. }
            | HarnessError::UnknownKey(_)
            | HarnessError::DuplicateKey(_)
            | HarnessError::MissingKey(_)
            | HarnessError::InvalidValue { .. } => "config",
            HarnessError::Io { .. } | HarnessError::Json { .. } | HarnessError::Csv { .. } => "io",
            HarnessError::Core(_) => "algorithm",
            HarnessError::EmptyRecords | HarnessError::Incompatible(_) => "report",
            HarnessError::RunsFailed { .. } => "run",
        }
    }

    /// Process exit code for the category. Usage errors from argument
    /// parsing exit with 2 before any of these apply.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 3,
            "io" => 4,
            "algorithm" => 5,
            "report" => 6,
            _ => 7,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
