use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
///
/// Variants fall into two families: invalid input (the caller asked for
/// something outside an operation's domain) and numerical failure (an
/// iteration or a check did not reach its tolerance). The CLI maps the
/// first family to exit code 2 and the second to exit code 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,

    #[error("root finder did not converge after {iterations} iterations (best residual {best_residual:e})")]
    RootsNoConvergence { iterations: usize, best_residual: f64 },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("critical points are not centered: sum of m_j c_j = {0}")]
    NotCentered(Complex64),

    #[error("critical points {0} and {1} coincide")]
    CoincidentCriticalPoints(usize, usize),

    #[error("P and Q share the root {0}")]
    CommonRoot(Complex64),

    #[error("chart vector has length {got}, expected {expected}")]
    ChartDimension { expected: usize, got: usize },

    #[error("Newton iteration diverged after {iterations} steps (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("Jacobian is numerically singular (condition number {0:e}); the stratum boundary has been reached")]
    SingularJacobian(f64),

    #[error("points do not form a cycle of f (defect {0:e})")]
    NotACycle(f64),

    #[error("orbit has exact period {exact}, not {requested}")]
    PeriodNotExact { requested: usize, exact: usize },

    #[error("orbit point {0} is a pole of f")]
    OrbitAtPole(Complex64),

    #[error("period {period} requires d^n = {count} fixed points, above the cap {cap}")]
    PeriodTooLarge { period: usize, count: usize, cap: usize },

    #[error("multiplier is 1 (|rho - 1| = {0:e}); use the cusp construction")]
    ParabolicOrbit(f64),

    #[error("multiplier is 0; A = B / rho is undefined")]
    SuperattractingOrbit,

    #[error("continued orbit points collapsed (separation {0:e})")]
    PeriodCollapse(f64),

    #[error("continued orbit left the continuation radius (moved {moved:e}, radius {radius:e})")]
    ContinuationJump { moved: f64, radius: f64 },

    #[error("orbit is degenerate: (f^n)'' vanishes at {0}")]
    DegenerateOrbit(Complex64),

    #[error("pole sum evaluated at its pole {0}")]
    EvalAtPole(Complex64),

    #[error("point {0} is at a critical value of f")]
    AtCriticalValue(Complex64),

    #[error("preimage {0} is nearly critical (|f'| = {1:e})")]
    IllConditionedPreimage(Complex64, f64),

    #[error("pole {0} of the pole sum lies on a critical point of f; use the numeric fit")]
    PoleAtCriticalPoint(Complex64),

    #[error("orbit pole at {pole} did not cancel in psi - T psi (|coefficient| = {magnitude:e})")]
    NonCancellation { pole: Complex64, magnitude: f64 },

    #[error("partial-fraction fit residual {0:e} exceeds threshold")]
    FitResidual(f64),

    #[error("critical point {0} lies on the orbit; the residue route does not apply")]
    CriticalPointOnOrbit(usize),

    #[error("no contour around critical point {0} separates it from other singularities")]
    ContourSeparation(usize),

    #[error("coordinate {0} is not a chart coordinate of this map")]
    InvalidCoordinate(String),

    #[error("cusp routes disagree: direct {direct}, limit {limit} (|delta| = {delta:e})")]
    CuspRouteMismatch {
        direct: Complex64,
        limit: Complex64,
        delta: f64,
    },

    #[error("orbit hypothesis violated: {0}")]
    Hypothesis(String),
}

impl Error {
    /// True for failures of a numerical tolerance, false for invalid input.
    pub fn is_tolerance_breach(&self) -> bool {
        matches!(
            self,
            Error::RootsNoConvergence { .. }
                | Error::NewtonDivergence { .. }
                | Error::SingularJacobian(_)
                | Error::NonCancellation { .. }
                | Error::FitResidual(_)
                | Error::CuspRouteMismatch { .. }
                | Error::PeriodCollapse(_)
                | Error::ContinuationJump { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
