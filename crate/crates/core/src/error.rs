use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("degenerate division: {0}")]
    DegenerateDivision(&'static str),

    #[error("device {device} has no feasible channel demand: {reason}")]
    NoFeasibleDemand { device: u32, reason: String },

    #[error("device {0} has no compression profile")]
    MissingCompression(u32),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("brute-force oracle limited to {max} devices, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::DegenerateDivision(_) => "degenerate-division",
            Error::NoFeasibleDemand { .. } => "no-feasible-demand",
            Error::MissingCompression(_) => "missing-compression",
            Error::InvariantViolation(_) => "invariant-violation",
            Error::OracleTooLarge { .. } => "oracle-too-large",
            Error::Structural(_) => "structural",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Toml(_) => "toml",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}
