use thiserror::Error;

/// Errors raised by the geometry kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// A caller-supplied argument is outside the operation's domain
    /// (bad index, unsupported rank, point off the required locus).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A value fails the invariant of the type it is meant to inhabit.
    #[error("domain error: {0}")]
    Domain(String),

    /// An Iwasawa factorization did not reproduce its input.
    #[error("decomposition failed: reconstruction residual {residual:e} exceeds {tolerance:e}")]
    Decomposition { residual: f64, tolerance: f64 },

    /// A finite-difference stencil would leave the upper half-space.
    #[error("finite-difference step {step:e} too large at y = {y}")]
    Step { step: f64, y: f64 },

    /// The two vectors spanning a plane are (numerically) dependent.
    #[error("degenerate plane: |u ^ v| = {area:e}")]
    DegeneratePlane { area: f64 },

    /// A linear-algebra step broke down (singular system, non-SPD metric).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
