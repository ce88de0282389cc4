use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("sample count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("grid too narrow for pulse: norm defect {defect:.3e} exceeds {limit:.1e}")]
    GridTooNarrow { defect: f64, limit: f64 },

    #[error("shifted mode leaves the grid: norm defect {defect:.3e} (delay {delay})")]
    SupportEscape { delay: f64, defect: f64 },

    #[error("insufficient tail room below the pulse: scattered norm defect {defect:.3e}")]
    InsufficientTail { defect: f64 },

    #[error("{parameter} = {value}: {source}")]
    AtPoint {
        parameter: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no gate-valid crossing of eta1^2 and eta2 found\n{diagnostics}")]
    NoCrossing { diagnostics: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason: reason.into(),
        }
    }

    pub(crate) fn at(self, parameter: &'static str, value: f64) -> Self {
        Error::AtPoint {
            parameter,
            value,
            source: Box::new(self),
        }
    }
}
