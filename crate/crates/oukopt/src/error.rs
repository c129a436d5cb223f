use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: caught before any computation runs.
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Numerical(oukopt_core::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": "error",
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
    }
}

impl From<oukopt_core::Error> for CliError {
    fn from(e: oukopt_core::Error) -> Self {
        use oukopt_core::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::TooFewPoints(_)
            | E::NonFinitePoint { .. }
            | E::RepeatedPoint { .. }
            | E::GridTooLarge { .. }
            | E::InvalidArgument(_) => CliError::Validation(e.to_string()),
            E::NearSingular { .. }
            | E::NotPositiveDefinite { .. }
            | E::SingularFim { .. }
            | E::Overflow { .. }
            | E::BracketFailure { .. }
            | E::CollapsedDesign => CliError::Numerical(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
