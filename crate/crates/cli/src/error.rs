use blockmap::criticality::CriticalError;
use blockmap::lab::LabError;
use blockmap::models::ModelError;
use blockmap::pipeline::PipelineError;
use blockmap::profile::ProfileError;
use thiserror::Error;

/// Errors by exit code: 1 usage, 2 data validation, 3 numerical non-convergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let msg = e.to_string();
        match e {
            ModelError::NoClosedForm { .. } | ModelError::CapExceeded { .. } | ModelError::NoEnumerator { .. } => {
                CliError::Usage(msg)
            }
            _ => CliError::Validation(msg),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Model(m) => m.into(),
            PipelineError::Series(s) => CliError::Validation(format!("inconsistent coefficient data: {s}")),
            PipelineError::Unsupported(msg) => CliError::Usage(msg),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        let msg = e.to_string();
        match e {
            LabError::InsufficientLength { .. } | LabError::BadP(_) | LabError::BadG1 => CliError::Usage(msg),
            LabError::Singular => CliError::NonConvergence(msg),
            LabError::NonPositive(_) | LabError::ZeroTerm(_) | LabError::DenominatorSignChange(_) => {
                CliError::Validation(msg)
            }
        }
    }
}

impl From<CriticalError> for CliError {
    fn from(e: CriticalError) -> Self {
        let msg = e.to_string();
        match e {
            CriticalError::NoConvergence(_) | CriticalError::Quadrature(_) => CliError::NonConvergence(msg),
            CriticalError::BelowUcrit { .. }
            | CriticalError::NonPositiveInput
            | CriticalError::QOutOfRange(_)
            | CriticalError::CentralChargeAboveOne(_)
            | CriticalError::NoClosedForm(_) => CliError::Usage(msg),
            _ => CliError::Validation(msg),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        let msg = e.to_string();
        match e {
            ProfileError::BadRadius(_) | ProfileError::TooFewPoints => CliError::Usage(msg),
            ProfileError::Quadrature { .. } | ProfileError::Underflow(_) => CliError::NonConvergence(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}
