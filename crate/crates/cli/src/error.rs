//! Error-to-exit-code mapping: 1 validation, 2 numeric, 3 capacity/budget.

use rmtwalks::clocks::ClockError;
use rmtwalks::combinat::CombinatError;
use rmtwalks::empirics::EmpiricsError;
use rmtwalks::ensemble::EnsembleError;
use rmtwalks::specfn::SpecFnError;
use rmtwalks::spectra::SpectraError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
    Capacity(String),
    Io(String),
}

impl CliError {
    pub fn validation(msg: String) -> CliError {
        CliError::Validation(msg)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Capacity(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Capacity(m) => write!(f, "capacity/budget error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> CliError {
        match e {
            EnsembleError::Capacity { .. } => CliError::Capacity(e.to_string()),
            EnsembleError::InvalidConfig(_) => CliError::Validation(e.to_string()),
            EnsembleError::Clock(c) => c.into(),
        }
    }
}

impl From<ClockError> for CliError {
    fn from(e: ClockError) -> CliError {
        match e {
            ClockError::ResolutionExceeded { .. } => CliError::Numeric(e.to_string()),
            ClockError::SpecFn(s) => s.into(),
        }
    }
}

impl From<SpecFnError> for CliError {
    fn from(e: SpecFnError) -> CliError {
        match e {
            SpecFnError::NonConvergent { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> CliError {
        match e {
            SpectraError::Ensemble(inner) => inner.into(),
            SpectraError::NotSymmetric | SpectraError::KindMismatch(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<CombinatError> for CliError {
    fn from(e: CombinatError) -> CliError {
        match e {
            CombinatError::BudgetExceeded { .. } => CliError::Capacity(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EmpiricsError> for CliError {
    fn from(e: EmpiricsError) -> CliError {
        match e {
            EmpiricsError::Ensemble(inner) => inner.into(),
            EmpiricsError::Spectra(inner) => inner.into(),
            EmpiricsError::KindMismatch { .. } | EmpiricsError::GridMismatch(_) => {
                CliError::Validation(e.to_string())
            }
            EmpiricsError::MixedGrids => CliError::Validation(e.to_string()),
        }
    }
}
