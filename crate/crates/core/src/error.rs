use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not converge within {max_terms} shells ({what})")]
    NonConvergence {
        what: &'static str,
        max_terms: usize,
    },

    #[error("quadrature failed to reach tolerance {tolerance:e} ({what})")]
    QuadratureFailure { what: &'static str, tolerance: f64 },

    #[error("empirical CDF requested for an empty sample")]
    EmptySample,

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error: {0}")]
    Validation(String),

    #[error("grid point a2={a2}, rho_db={rho_db} ({engine}) lacks a {missing} row")]
    MissingPair {
        a2: f64,
        rho_db: f64,
        engine: String,
        missing: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::QuadratureFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
