use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    Hermiticity { defect: f64 },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("negative eigenvalue {eigenvalue:.3e} below cutoff in square root")]
    NegativeSpectrum { eigenvalue: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("below extremal bound: {0}")]
    Extremality(String),
    #[error("no Nariai point: {0}")]
    NoNariai(String),
    #[error("parameter error: expected {expected} angles, got {got}")]
    Parameter { expected: usize, got: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Whether the error stems from invalid input rather than a numeric failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Numeric(_) | Error::NegativeSpectrum { .. } | Error::Hermiticity { .. }
        )
    }
}
