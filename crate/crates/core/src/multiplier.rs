//! The multiplier sequence of weighted moment ratios and its action on
//! Taylor coefficients.
//!
//! For a weight `v` and an integrable radial symbol `a`, the operator acts on
//! `h(z) = Σ h_n z^n` coefficientwise through
//! `gamma_n = ∫ r^(2n+1) v a dr / ∫ r^(2n+1) v dr`.

use std::io::{BufRead, Write};

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureConfig};
use crate::symbols::SymbolSpec;
use crate::weights::WeightSpec;

/// The ratios `gamma_0 .. gamma_n_max` for one (weight, symbol) pair.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplierSequence {
    pub gammas: Vec<f64>,
    pub weight_ref: String,
    pub symbol_ref: String,
    pub n_max: usize,
}

/// Finitely supported Taylor coefficients `h_0 .. h_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFunction {
    pub coeffs: Vec<Complex64>,
}

impl CoefficientFunction {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Reads the `n,re,im` CSV format; rows must enumerate n = 0, 1, ...
    /// contiguously.
    pub fn read_csv<R: BufRead>(reader: R, label: &str) -> Result<Self> {
        let err = |reason: String| Error::TableFormat {
            path: label.to_string(),
            reason,
        };
        let mut lines = reader.lines().enumerate();
        let head = match lines.next() {
            Some((_, Ok(l))) => l,
            Some((_, Err(e))) => {
                return Err(Error::Io {
                    path: label.into(),
                    source: e,
                })
            }
            None => return Err(err("empty file".into())),
        };
        if head.trim() != "n,re,im" {
            return Err(err(format!(
                "expected header `n,re,im`, found `{}`",
                head.trim()
            )));
        }
        let mut coeffs = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::Io {
                path: label.into(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(err(format!("row {}: expected 3 columns", i + 1)));
            }
            let n: usize = parts[0]
                .trim()
                .parse()
                .map_err(|_| err(format!("row {}: bad index", i + 1)))?;
            if n != coeffs.len() {
                return Err(err(format!(
                    "row {}: indices must be contiguous from 0 (expected {}, found {})",
                    i + 1,
                    coeffs.len(),
                    n
                )));
            }
            let re: f64 = parts[1]
                .trim()
                .parse()
                .map_err(|_| err(format!("row {}: bad re", i + 1)))?;
            let im: f64 = parts[2]
                .trim()
                .parse()
                .map_err(|_| err(format!("row {}: bad im", i + 1)))?;
            coeffs.push(Complex64::new(re, im));
        }
        if coeffs.is_empty() {
            return Err(err("no coefficient rows".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,re,im")?;
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{},{},{}", n, c.re, c.im)?;
        }
        Ok(())
    }
}

impl MultiplierSequence {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,gamma")?;
        for (n, g) in self.gammas.iter().enumerate() {
            writeln!(out, "{},{}", n, g)?;
        }
        Ok(())
    }
}

/// `∫ a r^e v dr / ∫ r^e v dr` for an arbitrary real exponent `e >= 0`; both
/// integrals share one mesh and one log-domain shift, seeded at the kernel
/// peak and at the symbol's breakpoints.
pub fn moment_ratio(
    w: &WeightSpec,
    a: &SymbolSpec,
    exponent: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(exponent >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "moment exponent {exponent} < 0"
        )));
    }
    let mut seeds = w.moment_seeds(exponent)?;
    seeds.extend(a.breakpoints());
    let r = numerics::integrate_ratio(
        |r| exponent * r.ln() + w.lw(r),
        |r| a.ev(r),
        0.0,
        &seeds,
        cfg,
    )?;
    Ok(r.ratio)
}

/// `gamma_n`, the ratio at exponent `2n + 1`.
pub fn gamma(w: &WeightSpec, a: &SymbolSpec, n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    moment_ratio(w, a, 2.0 * n as f64 + 1.0, cfg)
}

/// All of `gamma_0 .. gamma_n_max`. Entries are independent integrals; the
/// assembly order is deterministic.
pub fn gamma_sequence(
    w: &WeightSpec,
    a: &SymbolSpec,
    n_max: usize,
    cfg: &QuadratureConfig,
) -> Result<MultiplierSequence> {
    let mut gammas = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        gammas.push(gamma(w, a, n, cfg)?);
    }
    Ok(MultiplierSequence {
        gammas,
        weight_ref: w.spec_string(),
        symbol_ref: a.spec_string(),
        n_max,
    })
}

/// Coefficientwise action `h_n -> gamma_n h_n`.
pub fn apply_toeplitz(
    g: &MultiplierSequence,
    h: &CoefficientFunction,
) -> Result<CoefficientFunction> {
    if h.degree() > g.n_max {
        return Err(Error::RangeExceeded {
            degree: h.degree(),
            n_max: g.n_max,
        });
    }
    Ok(CoefficientFunction {
        coeffs: h
            .coeffs
            .iter()
            .zip(g.gammas.iter())
            .map(|(c, &g)| c * g)
            .collect(),
    })
}

/// Worst margin of the consecutive-exponent monotonicity of the moment
/// ratios of a non-increasing nonnegative symbol.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MonotonicityReport {
    pub k_max: usize,
    /// `min_k (ratio_k - ratio_(k+1))`; nonnegative up to quadrature noise.
    pub worst_margin: f64,
    pub worst_k: usize,
}

/// Verifies that `k -> ∫ a r^k v / ∫ r^k v` is non-increasing over the
/// consecutive integer exponents `k = 0 .. k_max` (a finer grid than the
/// odd exponents of the multiplier itself).
pub fn check_monotonicity(
    w: &WeightSpec,
    a: &SymbolSpec,
    k_max: usize,
    cfg: &QuadratureConfig,
) -> Result<MonotonicityReport> {
    if !a.is_nonneg_nonincreasing() {
        return Err(Error::InvalidParams(
            "monotonicity check needs a nonnegative non-increasing symbol".into(),
        ));
    }
    let mut worst = f64::INFINITY;
    let mut worst_k = 0;
    let mut prev = moment_ratio(w, a, 0.0, cfg)?;
    for k in 0..k_max {
        let next = moment_ratio(w, a, k as f64 + 1.0, cfg)?;
        let margin = prev - next;
        if margin < worst {
            worst = margin;
            worst_k = k;
        }
        prev = next;
    }
    Ok(MonotonicityReport {
        k_max,
        worst_margin: worst,
        worst_k,
    })
}
