use thiserror::Error;

use crate::literal::LiteralError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid confocal family: {0}")]
    InvalidFamily(String),
    #[error("caustic parameter {alpha} coincides with a_{index}")]
    DegenerateCaustic { alpha: f64, index: usize },
    #[error("caustic parameter {0} lies outside (0, a_d)")]
    CausticOutOfRange(f64),
    #[error("caustic interleaving violated: {0}")]
    AudinViolation(String),
    #[error("expected {expected} caustic parameters, got {got}")]
    CausticCount { expected: usize, got: usize },
    #[error("degenerate point for Jacobi coordinates")]
    DegeneratePoint,
    #[error("constant term of the series is not positive")]
    NonPositiveConstantTerm,
    #[error("constant term has no square root in the exact backend; use normalized mode")]
    IrrationalConstant,
    #[error("series has {have} coefficients but {need} are required")]
    InsufficientOrder { have: usize, need: usize },
    #[error("period {n} does not exceed the dimension {d}; such trajectories lie in a coordinate hyperplane")]
    PeriodTooSmall { n: usize, d: usize },
    #[error("Hankel matrix of size {rows}x{cols} has full rank; no Pell solution of degree {n}")]
    NoSolution { n: usize, rows: usize, cols: usize },
    #[error("null space is numerically ambiguous (singular values {smallest:e} and {second:e})")]
    IllConditioned { smallest: f64, second: f64 },
    #[error("q-hat has a non-real root (imaginary part {0:e})")]
    ComplexRoot(f64),
    #[error("caustic types do not match the requested winding variant: {0}")]
    TypeMismatch(String),
    #[error("point is off the boundary ellipsoid (residual {0:e})")]
    OffBoundary(f64),
    #[error("tangent line: chord length {0:e}")]
    TangentLine(f64),
    #[error("line lies in a symmetry hyperplane")]
    DegenerateLine,
    #[error("no direction through this point is tangent to the requested caustics")]
    NoTangentDirection,
    #[error("winding event on segment {segment} is within tolerance of an impact point")]
    AmbiguousEvent { segment: usize },
    #[error("trajectory is not closed")]
    NotClosed,
    #[error("singular linear system")]
    SingularSystem,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Literal(#[from] LiteralError),
}

pub type Result<T> = std::result::Result<T, Error>;
