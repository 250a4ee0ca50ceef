use mixbem::BemError;
use serde::Serialize;

/// Exit-code class of a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Bad config, bad input files, bad mesh. Exit 2.
    Config,
    /// The numerics refused to produce an answer. Exit 1.
    Numerical,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Numerical,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Numerical => 1,
            ErrorKind::Config => 2,
        }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind,
                "exit_code": self.exit_code(),
                "message": self.message,
            }
        })
        .to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<BemError> for CliError {
    fn from(e: BemError) -> Self {
        match e {
            BemError::NearSingular { .. } | BemError::SingularMatrix(_) => Self::numerical(e.to_string()),
            _ => Self::config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::config(format!("io error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
