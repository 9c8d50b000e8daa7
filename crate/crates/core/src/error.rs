use thiserror::Error;

/// Failure classes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("degenerate inertia: {0}")]
    DegenerateInertia(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown observable: {0}")]
    UnknownObservable(String),

    #[error("step failure: {0}")]
    StepFailure(String),

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("singular weight: {0}")]
    SingularWeight(String),

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Coarse class used by front ends to pick an exit status.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) => ErrorClass::Input,
            Error::SingularConfiguration(_)
            | Error::DegenerateInertia(_)
            | Error::Domain(_)
            | Error::UnknownObservable(_)
            | Error::InvalidLabel(_)
            | Error::GridTooCoarse(_)
            | Error::SingularWeight(_)
            | Error::ShapeMismatch(_) => ErrorClass::Domain,
            Error::StepFailure(_) | Error::ConvergenceFailure(_) => ErrorClass::Numeric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Domain,
    Numeric,
}

pub type Result<T> = std::result::Result<T, Error>;
