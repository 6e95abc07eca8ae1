use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure in {stage}: {source}")]
    Numerical {
        stage: &'static str,
        #[source]
        source: npk_core::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical { .. } => 2,
        }
    }
}

/// Attaches a stage name to core errors. Parameter errors name their field
/// and count as configuration errors.
pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for npk_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|e| match e {
            npk_core::Error::InvalidParameter { name, reason } => {
                CliError::Config(format!("field `{name}`: {reason} (in {stage})"))
            }
            source => CliError::Numerical { stage, source },
        })
    }
}
