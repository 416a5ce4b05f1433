use thiserror::Error;

/// Crate-wide error type.
///
/// Validation failures (bad parameters, violated model assumptions) are kept
/// separate from runtime failures (event caps, invalidated runs) so the CLI
/// can map them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("moment-generating function diverges: {0}")]
    MgfDomain(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("net profit condition violated: c = {c} must exceed (rho/delta)*E[U]*E[Y] = {required}")]
    NetProfit { c: f64, required: f64 },

    #[error("no positive root of the Lundberg exponent: {0}")]
    NoRoot(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("horizon required: {0}")]
    HorizonRequired(String),

    #[error("event cap of {max_events} exceeded at t = {t}")]
    MaxEventsExceeded { max_events: u64, t: f64 },

    #[error("{count} of {n} tilted paths hit the event cap before ruin; run is invalid")]
    PathNotRuined { count: u64, n: u64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad inputs rather than by a run going wrong.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDistribution(_)
                | Error::MgfDomain(_)
                | Error::InvalidParams(_)
                | Error::NetProfit { .. }
                | Error::NoRoot(_)
                | Error::HorizonRequired(_)
                | Error::InvalidConfig(_)
                | Error::ConfigParse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
