use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario line {line}, column {column}, field `{field}`: {msg}")]
    Scenario {
        line: usize,
        column: usize,
        field: String,
        msg: String,
    },
    #[error("invalid `{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error("trajectory line {line}: {msg}")]
    Trajectory { line: u64, msg: String },
    #[error("bad argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] fibersim_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn invalid(field: &str, msg: &str) -> Self {
        CliError::Invalid {
            field: field.to_owned(),
            msg: msg.to_owned(),
        }
    }
}
