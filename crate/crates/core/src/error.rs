use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitudes are not normalized: sum of squares plus residual is {total}")]
    Normalization { total: f64 },

    #[error("amplitude {index} is not finite ({value})")]
    InvalidAmplitude { index: usize, value: f64 },

    #[error("amplitude vector is empty")]
    EmptyState,

    #[error("operator order {order} exceeds the retained photon number {n_max}")]
    Dimension { order: usize, n_max: usize },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("parameters outside the admissible domain: {0}")]
    Domain(String),

    #[error("truncation needs more than {cap} terms to reach residual {epsilon:e}")]
    Truncation { cap: usize, epsilon: f64 },

    #[error("phase is undefined: mean field <a> = {mean_field:e} is below threshold")]
    PhaseUndefined { mean_field: f64 },

    #[error("closed form cannot be evaluated: {0}")]
    ClosedFormUndefined(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown figure id {0} (expected 1..=5)")]
    UnknownFigure(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status the command-line front end reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Csv(_) => 5,
            Error::ClosedFormUndefined(_) => 4,
            _ => 2,
        }
    }
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Param(msg.into())
}
