//! Numerical machinery for Besov-type spaces of generalized smoothness on
//! d-sets.
//!
//! The crate covers the full pipeline from symbols to operators:
//!
//! * [`symbols`] — complete Bernstein functions, the radial symbols they
//!   induce, scaling-index estimation and the trace exponent gate;
//! * [`levy`] — jump densities, the symbols they generate, and Bessel-type
//!   convolution kernels with their decay constants;
//! * [`sequences`] — admissible sequences, Boyd-type indices, and the
//!   minimal difference order they dictate;
//! * [`geometry`] — d-sets (interval domains, segments, self-similar Cantor
//!   sets) with distance oracles and d-measure quadrature;
//! * [`whitney`] — dyadic Whitney decompositions of the complement of a
//!   d-set and smooth partitions of unity subordinate to them;
//! * [`norms`] — the equivalent-norm family: Fourier-side, first-difference,
//!   k-th-difference with dyadic shell weights, dyadic-sum, modulus-based,
//!   and trace norms on d-measures;
//! * [`operators`] — ball-average restriction, Whitney extension, the
//!   codimension lift for full-dimensional domains, and the pair-sum check
//!   behind the restriction estimate.
//!
//! Floating-point reductions go through [`sum::pairwise_sum`], which always
//! splits index ranges at the same midpoints. Results are therefore
//! bit-identical whether the `parallel` feature is enabled or not, and do
//! not depend on the worker thread count.

pub mod geometry;
pub mod lattice;
pub mod levy;
pub mod norms;
pub mod operators;
pub mod quad;
pub mod sequences;
pub mod sum;
pub mod symbols;
pub mod whitney;

use thiserror::Error;

/// Error taxonomy shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter violates a documented precondition.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A sought value lies outside the search bracket or representable range.
    #[error("range error: {0}")]
    Range(String),
    /// A quadrature or iteration failed to converge to tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The requested quantity is below the resolution of the discretization.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// A size cap would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// A point or ball is not covered by the structure that should cover it.
    #[error("coverage error: {0}")]
    Coverage(String),
    /// The geometric configuration is invalid for the construction.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// An exponent gate fails; the message cites the violated inequality.
    #[error("gate failure: {0}")]
    Gate(String),
    /// The combination of inputs is valid mathematics but not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `n` points spaced log-uniformly with `10^a` and `10^b` as the endpoints.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "logspace needs at least two points");
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// `n` points spaced uniformly on `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}
