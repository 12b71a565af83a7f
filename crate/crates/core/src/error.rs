use num_complex::Complex64;
use thiserror::Error;

/// Errors returned by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("weight is undefined at n = {0}: outside the table and no tail rule covers it")]
    WeightUndefined(i64),

    #[error("point {z} is off the unit circle (| |z| - 1 | = {dev:e})")]
    OffCircle { z: Complex64, dev: f64 },

    #[error("series does not vanish at the divisor root: |f(z0)| = {residual:e} > {tol:e}")]
    NonVanishing { residual: f64, tol: f64 },

    #[error("jet condition fails at order {order}: |f^({order})(1)| = {value:e}")]
    JetViolation { order: usize, value: f64 },

    #[error("degree cap {cap} reached before the tail fell below {tol:e}")]
    DegreeCap { cap: usize, tol: f64 },

    #[error("the point set is empty")]
    EmptySet,

    #[error("repeated point at angle {0}")]
    DuplicatePoint(f64),

    #[error("construction stopped at level {level}: {reason}")]
    TooSparse { level: usize, reason: String },

    #[error("the defect operator has numerical rank 0")]
    RankZero,

    #[error("matrix is numerically singular (condition estimate {0:e})")]
    Singular(f64),

    #[error("fit window holds {got} points, at least {need} are required")]
    TooFewPoints { got: usize, need: usize },

    #[error("linear program failed: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures of the numerics themselves rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegreeCap { .. } | Error::TooSparse { .. } | Error::RankZero | Error::Singular(_) | Error::Solver(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
