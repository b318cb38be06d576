use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("measure of the whole space is infinite for this density in dimension {dimension}")]
    NonFiniteMeasure { dimension: u64 },

    #[error(
        "no balanced radius: radius-equation residual has no sign change on [{r_lo}, {r_hi}] \
         (log-ratio range [{log_ratio_lo}, {log_ratio_hi}])"
    )]
    NoBalancedRadius {
        r_lo: f64,
        r_hi: f64,
        log_ratio_lo: f64,
        log_ratio_hi: f64,
    },

    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    Bracket { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("objective is not finite anywhere on [{lo}, {hi}]")]
    NonFiniteObjective { lo: f64, hi: f64 },

    #[error("invalid density table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
