use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::sdp::{SdpProblem, SdpStatus};

/// Errors raised by the numerical core.
#[derive(Debug, Clone)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// Operands have incompatible dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// An iterative routine did not converge.
    NumericalFailure(String),
    /// The SDP solver stopped without an optimal certificate.
    SdpNotSolved { status: SdpStatus, problem: Box<SdpProblem> },
    /// A gentle projection would remove (almost) all of the state.
    DegenerateProjection { removed_mass: f64 },
    /// A constructed certificate failed one of its own inequalities.
    CertificateViolation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalFailure(_) | Error::SdpNotSolved { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::SdpNotSolved { status, problem } => write!(
                f,
                "SDP not solved (status {status:?}, {} blocks, {} constraints)",
                problem.blocks.len(),
                problem.constraints.len()
            ),
            Error::DegenerateProjection { removed_mass } => {
                write!(f, "degenerate projection: removes mass {removed_mass:.3e}")
            }
            Error::CertificateViolation(msg) => write!(f, "certificate violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
