use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree-0 spectral radius {rho} is outside the convergence radius {radius}")]
    ConvergenceRadius { rho: f64, radius: f64 },

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("invalid profile: {0}")]
    ProfileInvalid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether this error stems from user input rather than from a computation.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::ProfileInvalid(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
