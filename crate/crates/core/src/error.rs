use serde::Serialize;
use thiserror::Error;

/// How a failure should be reported to a caller that only sees exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ErrorClass {
    /// The input lies outside the mathematical domain of the operation.
    Domain,
    /// A series or integral could not be certified within its budget.
    Convergence,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("psi({x}) = {value} is not strictly positive")]
    NonPositivePsi { x: f64, value: f64 },

    #[error("limit of psi at {side} did not stabilize under probing")]
    LimitUndetermined { side: &'static str },

    #[error("|z| = {modulus} lies outside the coherent ring ({r1}, {r2})")]
    OutsideRing { modulus: f64, r1: f64, r2: f64 },

    #[error("z = 0 is excluded: the coherent expansion has negative powers")]
    ZeroPoint,

    #[error("series failed to certify a tail bound within {terms} terms")]
    DivergentSeries { terms: usize },

    #[error("|x| = {modulus} lies outside the annulus of convergence ({lower}, {upper})")]
    OutsideDomain { modulus: f64, lower: f64, upper: f64 },

    #[error("quadrature did not converge: {nodes} nodes used, error estimate {abs_err:e}")]
    QuadratureNoConvergence { nodes: usize, abs_err: f64 },

    #[error("integrand does not decay below the cutoff within |u| <= {limit}")]
    DecayTooSlow { limit: f64 },

    #[error("Mellin integrand does not decay along the vertical line (|sigma| <= {limit})")]
    NonDecayingIntegrand { limit: f64 },

    #[error("modulation is not invariant under x -> qx (relative mismatch {mismatch:e} at x = {x})")]
    NotPeriodic { x: f64, mismatch: f64 },

    #[error("modulation value {value} at x = {x} is not strictly positive")]
    NotPositive { x: f64, value: f64 },

    #[error("Bernoulli polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("functional-equation residual unavailable: {0}")]
    UnsupportedProvenance(String),

    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// Stable machine-readable identifier, one per variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPositivePsi { .. } => "NON_POSITIVE_PSI",
            Error::LimitUndetermined { .. } => "LIMIT_UNDETERMINED",
            Error::OutsideRing { .. } => "OUTSIDE_RING",
            Error::ZeroPoint => "ZERO_POINT",
            Error::DivergentSeries { .. } => "DIVERGENT_SERIES",
            Error::OutsideDomain { .. } => "OUTSIDE_DOMAIN",
            Error::QuadratureNoConvergence { .. } => "QUADRATURE_NO_CONVERGENCE",
            Error::DecayTooSlow { .. } => "DECAY_TOO_SLOW",
            Error::NonDecayingIntegrand { .. } => "NON_DECAYING_INTEGRAND",
            Error::NotPeriodic { .. } => "NOT_PERIODIC",
            Error::NotPositive { .. } => "NOT_POSITIVE",
            Error::DegreeTooLarge { .. } => "DEGREE_TOO_LARGE",
            Error::UnsupportedProvenance(_) => "UNSUPPORTED_PROVENANCE",
            Error::InvalidSpec(_) => "INVALID_SPEC",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::LimitUndetermined { .. }
            | Error::DivergentSeries { .. }
            | Error::QuadratureNoConvergence { .. }
            | Error::DecayTooSlow { .. }
            | Error::NonDecayingIntegrand { .. } => ErrorClass::Convergence,
            _ => ErrorClass::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
