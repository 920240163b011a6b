use thiserror::Error;

/// Errors raised by the library surface.
#[derive(Debug, Error)]
pub enum RvnError {
    #[error("vector field {0} needs a time partial but the callback supplies none")]
    MissingTimePartial(String),
    #[error("derivative order {order} exceeds the configured maximum {max}")]
    OrderOverflow { order: usize, max: usize },
    #[error("velocity box admits |v̂·ξ|/|ξ| = {0:.9}, too close to 1 for the resonance denominator")]
    ResonantVelocity(f64),
    #[error("time series needs at least {need} points spanning one decade, got {got}")]
    InsufficientSeries { need: usize, got: usize },
    #[error("non-positive value {0} in a log-log fit")]
    NonPositive(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical instability at t = {t}: {what}")]
    Instability { t: f64, what: String },
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RvnError>;
