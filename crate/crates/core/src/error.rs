use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error)]
pub enum CmvError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter sequence or configuration failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// A textual specification could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The eigenvalue iteration hit its sweep cap.
    #[error("QR iteration did not converge after {iterations} sweeps ({} eigenvalues found)", partial.len())]
    NonConvergence {
        iterations: usize,
        partial: Vec<Complex64>,
    },

    /// Newton refinement did not reach its tolerance.
    #[error("Newton refinement did not converge; last iterate {last}")]
    RefineNonConvergence { last: Complex64 },

    /// Newton refinement hit a (numerically) stationary point.
    #[error("stationary point encountered at {at}")]
    Stationary { at: Complex64 },

    /// The shifted matrix `zI - C` is numerically singular.
    #[error("numerically singular shift at z = {z}")]
    SingularShift { z: Complex64 },

    /// A rational approximant has a pole at the requested point.
    #[error("pole at z = {z}")]
    Pole { z: Complex64 },

    /// A combination of polynomials vanished where it is used as a divisor.
    #[error("degenerate combination: {0}")]
    Degenerate(String),

    /// A multivalued closed form was evaluated too close to a branch point.
    #[error("too close to a branch point at z = {z}")]
    BranchPoint { z: Complex64 },
}

pub type Result<T> = std::result::Result<T, CmvError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(CmvError::Domain(msg.into()))
}
