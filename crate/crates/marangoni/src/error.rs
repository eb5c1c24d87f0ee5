use thiserror::Error;

/// Failures raised by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("alpha = {alpha} exceeds the representable bound {bound}")]
    Overflow { alpha: f64, bound: f64 },

    #[error("root bracketing failed for alpha = {alpha}: found {found} of {wanted} real roots on beta in [{lo}, {hi}]")]
    RootNotFound {
        alpha: f64,
        found: usize,
        wanted: usize,
        lo: f64,
        hi: f64,
    },

    #[error("{what} residual {value:e} exceeds {limit:e}")]
    Residual { what: String, value: f64, limit: f64 },

    #[error("non-simple or misnormalized target (pairing = {0:e})")]
    ZeroPairing(f64),

    #[error("resonant/critical target in stable sum (beta = {0:e})")]
    Resonant(f64),

    #[error("coefficient identity violated: {name} residual {value:e} above {limit:e}")]
    IdentityViolation { name: String, value: f64, limit: f64 },

    #[error("wrong critical-set shape: {0}")]
    Shape(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True when the failure comes from bad user input rather than numerics.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Shape(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
