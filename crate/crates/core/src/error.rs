use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate environment: all arms have the same mean, so the gap is undefined")]
    DegenerateEnvironment,

    #[error("environment needs at least 2 arms, got {0}")]
    TooFewArms(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("arm {0} is not suboptimal")]
    NotSuboptimal(usize),

    #[error("infinite divergence: best mean is 1, no Bernoulli alternative can beat it")]
    InfiniteDivergence,

    #[error("unsupported family: arm {0} is not Bernoulli")]
    UnsupportedFamily(usize),

    #[error("horizon {horizon} is shorter than the number of arms {arms}")]
    HorizonTooShort { horizon: u64, arms: usize },

    #[error("cannot take log: mean regret at n = {0} is not positive")]
    NonPositiveRegret(u64),

    #[error("growth exponent needs at least 3 checkpoints in the window, found {0}")]
    TooFewCheckpoints(usize),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
