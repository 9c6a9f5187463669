use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "CFL condition violated: courant number c*dt/dx = {courant} is outside [zeta, 1 - xi] = [{zeta}, {}]",
        1.0 - xi
    )]
    Cfl { courant: f64, zeta: f64, xi: f64 },

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("expected {expected} source levels, got {got}")]
    LevelCount { expected: usize, got: usize },

    #[error("adaptive quadrature exceeded its budget of {budget} intervals")]
    QuadratureBudget { budget: usize },

    #[error("non-finite value at time level {level}")]
    NonFinite { level: usize },

    #[error("negative discrete energy {value} at half-step {k}+1/2")]
    NegativeEnergy { k: usize, value: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
