use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Core(#[from] fraglab_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot encode output: {0}")]
    Encode(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }

    /// 2 for anything the user can fix in the configuration, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use fraglab_core::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Core(
                E::InvalidParameter { .. }
                | E::InvalidWindow(_)
                | E::InvalidConfig(_)
                | E::MissingSeed
                | E::UnknownRegime
                | E::ProportionOutOfRange { .. }
                | E::BoundaryNotMonotone { .. }
                | E::InsufficientSamples { .. }
                | E::Precondition(_),
            ) => 2,
            _ => 1,
        }
    }
}
