use thiserror::Error;

use crate::admissibility::AdmissibilityDecision;

/// Errors raised by the choreography library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChoreoError {
    #[error("at least 4 bodies are required, got N = {0}")]
    TooFewBodies(i64),

    #[error("|p| must be at least 2, got p = {0}")]
    ExcludedExponent(i64),

    #[error("curve coefficients must satisfy a*b != 0 and be finite (a = {a}, b = {b})")]
    DegenerateCurve { a: f64, b: f64 },

    #[error("(p = {p}, N = {n_bodies}) is not admissible")]
    Inadmissible {
        p: i64,
        n_bodies: usize,
        decision: AdmissibilityDecision,
    },

    #[error("(p = {p}, N = {n_bodies}) does not admit the alternating coupling pattern")]
    NotRestrictedAdmissible {
        p: i64,
        n_bodies: usize,
        decision: AdmissibilityDecision,
    },

    #[error("coefficient system is singular for (p = {p}, N = {n_bodies}): det = {det:e}")]
    IllPosed { p: i64, n_bodies: usize, det: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range [{lo}, {hi}]")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("invalid time range [{t0}, {t1}] with {count} samples")]
    BadRange { t0: f64, t1: f64, count: usize },

    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),

    #[error("grid needs at least 8 points, got {0}")]
    BadGrid(usize),

    #[error("{m} x {n} is not a factorization of N = {n_bodies} with both factors >= 2")]
    NotComposite { m: usize, n: usize, n_bodies: usize },

    #[error("trajectory has no samples")]
    EmptyTrajectory,
}

pub type Result<T, E = ChoreoError> = std::result::Result<T, E>;
