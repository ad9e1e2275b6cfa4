//! Error types shared across the crate.

use thiserror::Error;

/// Errors surfaced by fallible library operations.
///
/// Internal invariant violations (for example mixing two different quadratic
/// extensions in one expression) are programming errors and panic instead.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("zero denominator in rational function")]
    ZeroDenominator,

    #[error("pole of order > 1 at expansion point")]
    HigherOrderPole,

    #[error("invalid ensemble parameters: {0}")]
    InvalidParams(String),

    #[error("sigma map undefined at z = 0")]
    ZeroArgument,

    #[error("square root does not exist in this field")]
    NoSquareRoot,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("invalid tiling data: {0}")]
    InvalidTiling(String),

    #[error("no tiling-slice parameter branch applies: {0}")]
    NoCaseApplies(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("degenerate weight: Hankel minor vanishes at degree {0}")]
    DegenerateWeight(usize),

    #[error("node index {0} outside 0..={1}")]
    IndexOutOfRange(usize, usize),

    #[error("infinite product does not converge: {0}")]
    NonConvergent(String),

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("rational matrix failed polynomial reduction: {0}")]
    NotPolynomial(String),

    #[error("lower corner quadratic degenerates: leading coefficient is zero")]
    DegenerateQuadratic,

    #[error("spectral point sits at an involution fixed point t = +-u")]
    InvolutionFixedPoint,

    #[error("coordinate chart hits a base point: {0}")]
    BasePointHit(String),

    #[error("discrete flow step is indeterminate: {0}")]
    IndeterminateStep(String),

    #[error("matrix violates the diagonal normalization at infinity: {0}")]
    NonDiagonalLimit(String),

    #[error("coordinate layer check failed: {0}")]
    ChartMismatch(String),

    #[error("unknown word token: {0}")]
    UnknownToken(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
