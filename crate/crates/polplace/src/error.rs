//! Error type shared by every module of the toolkit.

use num_complex::Complex64;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A pivot fell below the rank tolerance during elimination.
    #[error("singular matrix: pivot {pivot:.3e} below tolerance {tol:.3e} at step {step}")]
    SingularMatrix { step: usize, pivot: f64, tol: f64 },

    /// A non-real root was supplied without its complex conjugate.
    #[error("non-real root {re}{im:+}i has no conjugate partner in the set")]
    UnpairedComplexRoot { re: f64, im: f64 },

    /// Root iteration hit the cap without meeting the residual bound.
    #[error("root finding did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<Complex64>,
    },

    /// The chains span a proper subspace: the pair (A, B) is not controllable.
    #[error("system not controllable: chains reach dimension {achieved} of {n} (lengths {lengths:?})")]
    NotControllable {
        achieved: usize,
        n: usize,
        lengths: Vec<(usize, usize)>,
    },

    /// Dual of `NotControllable` for the pair (A, C).
    #[error("system not observable: chains reach dimension {achieved} of {n} (lengths {lengths:?})")]
    NotObservable {
        achieved: usize,
        n: usize,
        lengths: Vec<(usize, usize)>,
    },

    /// The assembled transform could not be inverted (tolerance inconsistency).
    #[error("canonical transform is numerically singular: {0}")]
    SingularTransform(String),

    /// A transformed matrix strayed from its required structure.
    #[error("canonical form violated at ({row},{col}): |{value:.3e}| exceeds tolerance {tol:.3e} ({context})")]
    FormViolation {
        row: usize,
        col: usize,
        value: f64,
        tol: f64,
        context: String,
    },

    /// No block assignment keeps every complex-conjugate pair intact.
    #[error("cannot partition poles over blocks {block_sizes:?} without splitting a conjugate pair")]
    UnsatisfiablePartition { block_sizes: Vec<usize> },

    /// Incompatible operand shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A simulated state left the representable range.
    #[error("simulation diverged at step {step} (t = {time}): |state| = {magnitude:.3e} exceeds 1e12")]
    Divergence {
        step: usize,
        time: f64,
        magnitude: f64,
    },

    /// Malformed input file.
    #[error("parse error: {0}")]
    ParseError(String),

    /// Structurally valid file with inconsistent dimensions.
    #[error("dimension error: {0}")]
    DimensionError(String),

    /// Invalid argument or option value.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
