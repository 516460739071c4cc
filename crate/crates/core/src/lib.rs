//! Numerical engine for Toeplitz operators with radial symbols on weighted
//! sup-norm spaces of analytic functions on the unit disc.
//!
//! A radial symbol `a` acts on an analytic function through a Taylor
//! coefficient multiplier whose entries are weighted moment ratios
//! `gamma_n = ∫ r^(2n+1) v a dr / ∫ r^(2n+1) v dr`. Boundedness and
//! compactness of the operator are equivalent to the behaviour of the L1
//! norms of trapezoidal frequency windows applied to the series
//! `Σ gamma_j e^(ijφ)`, with window supports driven by a sequence of block
//! indices built from the weight's moment maximizers.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`] — graded-mesh Gauss quadrature (plain and log-domain),
//!   FFT synthesis of circle L1 norms, monotone interpolation, line search.
//! * [`weights`] — weight models on `[0, 1)`, their moments and maximizer
//!   radii, and numerical checkers for the classical regularity conditions.
//! * [`symbols`] — radial symbol models, derivatives, and decay-hypothesis
//!   checkers.
//! * [`blocks`] — block index sequences, generic induction and closed forms.
//! * [`multiplier`] — the multiplier sequence and its coefficientwise action.
//! * [`window`] — trapezoidal frequency windows, L1 diagnostics and the
//!   associated upper-bound evaluators.
//! * [`verify`] — seeded randomized verification of the supporting
//!   inequalities.
//!
//! All operations are pure functions of their arguments; nothing here keeps
//! shared mutable state, so concurrent use is safe.

// Validation sites use `!(x > 0.0)` so NaN fails closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod error;
pub mod multiplier;
pub mod numerics;
pub mod symbols;
pub mod verify;
pub mod weights;
pub mod window;

pub use error::{Error, Result};
