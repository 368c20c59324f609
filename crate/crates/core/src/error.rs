use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("no partial wetting: cos(theta) = {0} lies outside (-1, 1)")]
    NoPartialWetting(f64),

    #[error("singular mobility derivative at h = 0 for n = {0} < 1")]
    SingularDerivative(f64),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("no separatrix bracket found: every trial coefficient classified as {0}")]
    NoSeparatrix(String),

    #[error("series seed invalid: {0}")]
    Seed(String),

    #[error("unknown regime `{0}`")]
    UnknownRegime(String),

    #[error("configuration error at `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("measurement window error: {0}")]
    Window(String),

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("degenerate least-squares design: {0}")]
    Degenerate(String),

    #[error("solver failure at t = {t}: {msg}")]
    Solver { t: f64, msg: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { key: key.into(), msg: msg.into() }
    }
}
