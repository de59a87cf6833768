//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix shape mismatch in an arithmetic operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// LU factorization hit a (numerically) singular matrix.
    #[error("singular matrix in {context} (pivot magnitude {pivot:.3e})")]
    SingularMatrix { context: &'static str, pivot: f64 },

    /// Condition-number guard tripped during inversion.
    #[error("ill-conditioned matrix in {context}: cond estimate {cond:.3e} > 1e12")]
    IllConditioned { context: &'static str, cond: f64 },

    /// Vandermonde fit got repeated lambda^2 sample points or too few samples.
    #[error("degenerate fit samples: {0}")]
    DegenerateSamples(String),

    /// A map/point precondition failed (zero k, u, v, tau, ...).
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// The Yang-Baxter map hit its singular set.
    #[error("singular map point in {context}: pivot = {pivot}")]
    SingularMap { context: &'static str, pivot: Complex64 },

    /// Chain evolution hit a vanishing cell factor.
    #[error("evolution singularity at cell {cell}: g = {g}")]
    EvolutionSingularity { cell: usize, g: Complex64 },

    /// A tau-field cell vanished or a solution pole was hit.
    #[error("degenerate solution at cell ({x1},{x2}): {what}")]
    DegenerateSolution { x1: usize, x2: usize, what: &'static str },

    /// q fails the genericity requirement for the requested spins.
    #[error("q is too close to a root of unity: |q^{power} - 1| = {dist:.3e}")]
    NonGenericQ { power: i32, dist: f64 },

    /// Tensor space exceeds the configured dimension guard.
    #[error("dimension guard: requested space of dimension {dim} exceeds {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    /// Evaluation landed on a branch cut with no side specified.
    #[error("branch ambiguity: argument {0} lies on the cut")]
    BranchAmbiguity(num_complex::Complex64),

    /// Quadrature could not reach the requested accuracy.
    #[error("quadrature failed to converge in {context}: {detail}")]
    QuadratureFailure { context: &'static str, detail: String },

    /// Parameter outside the computable domain (e.g. bad b for the dilogarithm).
    #[error("parameter domain: {0}")]
    ParameterDomain(String),

    /// I/O or serialization problem (CLI paths).
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization problem.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
