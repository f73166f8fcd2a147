use thiserror::Error;

/// Which argument of a kernel came too close to the period lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleArg {
    W,
    Lambda,
}

impl std::fmt::Display for PoleArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoleArg::W => f.write_str("w"),
            PoleArg::Lambda => f.write_str("lambda"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid modulus: Im(tau) = {0} must be strictly positive")]
    InvalidModulus(f64),
    #[error("theta series did not reach tolerance within {0} terms; use the modular fallback")]
    TruncationOverflow(usize),
    #[error("{arg} lies within {distance:e} of the period lattice (pole margin {margin:e})")]
    NearPole { arg: PoleArg, distance: f64, margin: f64 },
    #[error("strip violation: {0}")]
    Strip(String),
    #[error("lambda out of band: {0}")]
    Band(String),
    #[error("mu outside the analyticity zone: {0}")]
    Zone(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("truncation window cannot certify degree {0}")]
    WindowInsufficient(i64),
    #[error("non-finite sample at quadrature node {0}")]
    NonFinite(usize),
    #[error("quadrature not converged: |Q(M) - Q(2M)| = {0:e}")]
    QuadratureUnstable(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
