use somp_core::alasso::AlassoError;
use somp_core::baselines::BaselineError;
use somp_core::datamodel::DataError;
use somp_core::simgen::SimError;
use somp_core::somp::SompError;

/// Top-level failure, partitioned by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Exit code 2: invalid configuration or arguments.
    #[error("config error: {0}")]
    Config(String),
    /// Exit code 3: unreadable or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),
    /// Exit code 4: the numerics could not complete.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidSpec(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SompError> for CliError {
    fn from(e: SompError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<AlassoError> for CliError {
    fn from(e: AlassoError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
