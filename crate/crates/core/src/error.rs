use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("{what} is singular at {value}")]
    Singular { what: &'static str, value: f64 },

    #[error("invalid game parameter `{name}` = {value}: {reason}")]
    InvalidParams {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid strategy profile (x = {x}, y = {y}): {reason}")]
    InvalidStrategy {
        x: f64,
        y: f64,
        reason: &'static str,
    },

    #[error("no sign change of chi in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("closed-form approximation undefined: W argument {arg} below -1/e")]
    ApproxUndefined { arg: f64 },

    #[error("empty observation window")]
    EmptyWindow,

    #[error("reference utility {value} is not positive")]
    DegenerateUtility { value: f64 },

    #[error("invalid prior: {0}")]
    InvalidPrior(&'static str),

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(&'static str),
}
