use thiserror::Error;

/// Snapshot captured when the stepper meets a non-finite momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDump {
    pub time: f64,
    pub step: u64,
    pub index: usize,
    pub momenta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inverse collision map is singular at lambda = 0")]
    SingularInverse,
    #[error("collision map is degenerate: Jacobian bracket vanishes")]
    DegenerateMap,
    #[error("degenerate flow: particle current is not timelike (N.N = {0})")]
    DegenerateFlow(f64),
    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("non-finite momentum for particle {} at t = {} (step {})", .0.index, .0.time, .0.step)]
    NonFinite(Box<StateDump>),
    #[error("diagnostics sink failed: {0}")]
    Sink(String),
    #[error("empty ensemble")]
    EmptyEnsemble,
}

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::Config { field: field.to_string(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
