use thiserror::Error;

/// Errors produced by the game model, solver, dataset and learners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game config: {0}")]
    InvalidConfig(String),

    #[error("illegal showdown: both players hold card {0}")]
    IllegalShowdown(usize),

    #[error("config mismatch: {0}")]
    ConfigMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("degenerate deal: every joint outcome has both players holding the same card")]
    DegenerateDeal,

    #[error("dimension error: {0}")]
    DimensionError(String),

    #[error("representation error: {0}")]
    RepresentationError(String),

    #[error("solver did not reach epsilon {epsilon:e} after {iterations} iterations (best nash_conv {nash_conv:e})")]
    ConvergenceFailure {
        epsilon: f64,
        iterations: usize,
        nash_conv: f64,
        best: Box<crate::equilibrium::EquilibriumResult>,
    },

    #[error("game {id} (seed {seed:#018x}) did not converge after a retry: nash_conv {nash_conv:e}")]
    GenerationFailed { id: usize, seed: u64, nash_conv: f64 },

    #[error("split error: {0}")]
    SplitError(String),

    #[error("model has no stored examples")]
    EmptyModel,

    #[error("evaluation error: {0}")]
    EvalError(String),

    #[error("no probes qualify for this rule")]
    NoProbes,

    #[error("dataset format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
