use thiserror::Error;

/// Errors surfaced by the solver and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside horizon [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no equilibrium found for {0}")]
    NoEquilibrium(String),

    #[error("HJB blow-up guard tripped: |V| reached {value:.3e} at step {step} (bound 1e3)")]
    BlowUp { value: f64, step: usize },

    #[error("oracle limited to at most {max} players, got {got}")]
    OracleTooLarge { max: usize, got: usize },

    #[error("control table does not match the simulation config: {0}")]
    ControlMismatch(String),

    #[error("malformed control table file: {0}")]
    BadControlFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
