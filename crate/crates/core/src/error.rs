use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("input error: {0}")]
    Input(String),
    /// Mathematically undefined request, e.g. a singular model.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numeric refinement could not reach the requested accuracy.
    #[error("precision error: {0}")]
    Precision(String),
    /// A search or enumeration exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
