//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the numerical engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The graded mesh was exhausted before the tail of the integral became
    /// negligible at the requested tolerance.
    #[error("quadrature did not converge over [{lo}, 1): tail panel still contributes {tail_ratio:.3e} of the total after {panels} panels")]
    NonConvergence {
        lo: f64,
        panels: usize,
        tail_ratio: f64,
    },

    /// An integrand produced NaN or an unexpected infinity at a node.
    #[error("integrand evaluated to a non-finite value at r = {r}")]
    InvalidDomain { r: f64 },

    /// A circle grid is too coarse for the frequencies present.
    #[error("grid of {num_points} points undersamples max frequency {k_max} (need at least {required})")]
    UndersampledGrid {
        num_points: usize,
        k_max: u64,
        required: usize,
    },

    /// Argument outside the domain of an operation.
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    /// Derivative requested where the symbol model has a jump.
    #[error("symbol is not differentiable at r = {r}")]
    NotDifferentiable { r: f64 },

    /// The block construction constant must exceed 2.
    #[error("block construction constant must exceed 2, got {0}")]
    InvalidB(f64),

    /// Invalid or inconsistent parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A closed-form index left the representable range.
    #[error("index overflow: {0}")]
    Overflow(String),

    /// Consecutive block indices share an integer part, so the window ramp
    /// degenerates.
    #[error("degenerate block at position {pos}: integer parts collide ({m_prev}, {m_mid}, {m_next})")]
    DegenerateBlock {
        pos: usize,
        m_prev: i64,
        m_mid: i64,
        m_next: i64,
    },

    /// A coefficient function extends past the multiplier range.
    #[error("coefficient degree {degree} exceeds multiplier range {n_max}")]
    RangeExceeded { degree: usize, n_max: usize },

    /// The moment denominator vanished even in the log domain.
    #[error("moment denominator underflowed in log domain (exponent {exponent})")]
    DenominatorUnderflow { exponent: f64 },

    /// A normalizing factor of a ratio statistic is zero.
    #[error("degenerate division: {0}")]
    DivisionDegenerate(String),

    /// A weight or symbol spec string failed to parse.
    #[error("invalid spec `{spec}`: {reason}")]
    SpecParse { spec: String, reason: String },

    /// Underlying I/O failure with the offending path.
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A CSV table violated the expected format or invariants.
    #[error("invalid table {path}: {reason}")]
    TableFormat { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
