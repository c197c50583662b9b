use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("missing {0}")]
    Missing(&'static str),

    #[error("{what} did not converge after {iterations} iterations (best estimate {best})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        best: f64,
    },

    #[error("non-finite iterate at k = {k}")]
    NonFinite {
        k: usize,
        prefix: Box<Vec<crate::algorithms::IterTrace>>,
    },

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("step size underflow at t = {t} (h = {h:e}); system is too stiff")]
    Stiffness { t: f64, h: f64 },

    #[error("pole: {0}")]
    Pole(String),

    #[error("outside supported domain: {0}")]
    Domain(String),

    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),

    #[error("ill-conditioned basis (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("imaginary residue {residue:e} exceeds tolerance at t = {t}")]
    ImaginaryResidue { t: f64, residue: f64 },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
