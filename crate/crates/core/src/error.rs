use thiserror::Error;

/// Errors produced anywhere in the simulation and reconstruction pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot construct state: {0}")]
    Construction(String),

    #[error("degenerate post-selection: {0}")]
    DegeneratePostSelection(String),

    #[error("post-selection failure: success probability {0:e} below threshold")]
    PostSelectionFailure(f64),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("non-invertible coupling: |sin(alpha)| = {0:e}")]
    NonInvertibleCoupling(f64),

    #[error("degenerate angle: {0}")]
    DegenerateAngle(String),

    #[error("invalid argument: {0}")]
    Argument(String),
}

impl Error {
    /// Stable machine-readable tag, used in serialized error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Construction(_) => "construction",
            Error::DegeneratePostSelection(_) => "degenerate post-selection",
            Error::PostSelectionFailure(_) => "post-selection failure",
            Error::UndefinedRatio(_) => "undefined ratio",
            Error::NonInvertibleCoupling(_) => "non-invertible coupling",
            Error::DegenerateAngle(_) => "degenerate angle",
            Error::Argument(_) => "argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
