use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("infinite product does not converge: {0}")]
    Nonconvergent(String),
    #[error("recurrence coefficient denominator vanishes: {0}")]
    RecurrenceSingular(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("total mass check failed: |mass - 1| = {deviation:e} > {tol:e}")]
    MassCheckFailed { deviation: f64, tol: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonconverged(String),
    #[error("continuous density changes sign: {0}")]
    SignInconsistent(String),
    #[error("conditioning point {0} is not in the support")]
    XNotInSupport(f64),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("polynomial expansion is singular: {0}")]
    ExpansionSingular(String),
    #[error("stationary solve failed: {0}")]
    SolveFailed(String),
    #[error("recovered weight {weight:e} at word {word} is negative")]
    NegativeMass { word: usize, weight: f64 },
    #[error("phase precondition failed: {0}")]
    Phase(String),
    #[error("unknown check: {0}")]
    UnknownCheck(String),
}
