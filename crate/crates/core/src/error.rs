use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::QuadratureResult;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A recurrence produced a non-finite value even with renormalization.
    #[error("non-finite value in recurrence at step {step} for z = {z}")]
    Overflow { step: usize, z: Complex64 },

    /// The denominator polynomial of a ratio is (numerically) zero at `z`.
    #[error("z = {z} is within scaled threshold of a zero of the denominator polynomial")]
    PoleProximity { z: Complex64 },

    /// The requested closed form is not valid at `z`; use the direct path.
    #[error("{form} is not defined at z = {z}: {reason}")]
    Domain {
        form: &'static str,
        z: Complex64,
        reason: &'static str,
    },

    #[error("degenerate kernel: K_n(z,z) = {k} is not positive")]
    DegenerateKernel { k: f64 },

    /// A Gram determinant came out clearly negative; not a rounding artifact.
    #[error("kernel determinant {value:e} is negative beyond rounding slack")]
    NegativeIntensity { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature budget exceeded after {} cells (estimate {} +/- {})", best.cells, best.value, best.error_estimate)]
    BudgetExceeded { best: QuadratureResult },

    /// Every jittered re-walk of the boundary still hit a zero.
    #[error("zero on or too close to region boundary after {retries} retries")]
    BoundaryZero { retries: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Config(err.to_string())
    }
}

impl Error {
    /// Numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::BudgetExceeded { .. }
                | Error::BoundaryZero { .. }
                | Error::NegativeIntensity { .. }
                | Error::DegenerateKernel { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
