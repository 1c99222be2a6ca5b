use thiserror::Error;

pub type Result<T> = std::result::Result<T, OracleError>;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("Fock space too large: dims {dims:?} give {total} states (limit {limit})")]
    DimensionOverflow { dims: Vec<usize>, total: u128, limit: usize },

    #[error("envelope not supported here: {0}")]
    UnsupportedEnvelope(&'static str),

    #[error("norm drifted by {drift:e} at t = {time}")]
    NormDrift { time: f64, drift: f64 },

    #[error("mode map lost unitarity (residual {residual:e}) at t = {time}")]
    UnitarityDrift { time: f64, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Core(#[from] osc_core::Error),
}
