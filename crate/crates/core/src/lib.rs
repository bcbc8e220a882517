//! # meandiff
//!
//! Bivariate means, the nonnegative differences between them, and the
//! machinery that checks inequalities among those differences.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`means`] | Gini, power and Lehmer means; named means and their generators |
//! | [`differences`] | Mean differences `D(a,b) = b·g(a/b)`, second-derivative certificates, V-measures |
//! | [`inequalities`] | Inequality chains, β-constants, sampled audits |
//! | [`polycert`] | Exact real-root isolation and positivity certificates for polynomials |
//! | [`divergences`] | Divergence measures over discrete distributions |
//!
//! Every mean `M` here is symmetric and 1-homogeneous, so it is determined by
//! its generator `f_M(x) = M(x, 1)`. A difference of two ordered means is
//! then `D_tp(a,b) = b·(f_t − f_p)(a/b)`, and an inequality between two
//! differences only has to be checked on the half-line `x = a/b > 0`.
//!
//! ```
//! use meandiff::means::{mean_value, MeanKind, PositivePair};
//!
//! let p = PositivePair::new(4.0, 9.0).unwrap();
//! assert!((mean_value(MeanKind::G, p).unwrap() - 6.0).abs() < 1e-12);
//! ```
//!
//! ## Parallelism
//!
//! Audits over many samples run on rayon when the `parallel` feature is on
//! (the default). Results are identical with [`Execution::Sequential`]:
//! samples are drawn from per-chunk ChaCha streams and reductions break ties
//! by sample index.

use thiserror::Error;

pub mod differences;
pub mod divergences;
pub mod exec;
pub mod inequalities;
pub mod means;
pub mod polycert;
pub mod rational;
pub mod scalar;

pub use exec::Execution;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or out-of-range argument.
    #[error("invalid input: {0}")]
    Input(String),
    /// Value outside the domain of a measure (e.g. a zero probability).
    #[error("domain error: {0}")]
    Domain(String),
    /// A difference pair without a closed-form second derivative.
    #[error("no closed-form certificate for {0}")]
    UnsupportedPair(String),
    /// A ratio whose denominator vanishes.
    #[error("degenerate ratio: {0}")]
    DegenerateRatio(String),
    /// Text that failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
