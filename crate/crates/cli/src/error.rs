use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required fields: {}", .0.join(", "))]
    MissingFields(Vec<String>),
    #[error("{0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl ConfigError {
    pub(crate) fn in_file(self, path: &Path) -> ConfigError {
        let p = path.display();
        match self {
            ConfigError::MissingFields(f) => {
                ConfigError::Parse(format!("{p}: missing required fields: {}", f.join(", ")))
            }
            ConfigError::Parse(m) => ConfigError::Parse(format!("{p}: {m}")),
            ConfigError::Invalid(m) => ConfigError::Invalid(format!("{p}: {m}")),
            io => io,
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{variable} = {value} ({scenario}): {source}")]
    Point {
        variable: &'static str,
        value: f64,
        scenario: String,
        #[source]
        source: hetsim_core::Error,
    },
    #[error("writing results: {0}")]
    Output(String),
}

impl SweepError {
    /// Process exit code: 2 for configuration problems, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        use hetsim_core::Error as E;
        match self {
            SweepError::Config(ConfigError::Io(_)) | SweepError::Output(_) => 1,
            SweepError::Config(_) => 2,
            SweepError::Point { source, .. } => match source {
                E::Numerical { .. } | E::Singularity(_) | E::EmptyTier(_) => 3,
                _ => 2,
            },
        }
    }
}
