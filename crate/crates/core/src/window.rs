//! Trapezoidal frequency windows over the block indices, their circle L1
//! norms, and the diagnostics deciding bounded/compact evidence for the
//! coefficient multiplier.
//!
//! The window at position `n` covers integer frequencies
//! `[m_(n-1)] < k <= [m_(n+1)]` with a piecewise-linear profile that ramps up
//! to 1 at `[m_n]` and back down to 0. Applied to the multiplier series the
//! window isolates one block; the operator is bounded iff the window norms
//! stay bounded and compact iff they tend to zero, so a finite sweep of
//! `∫ |W_n f_a| dφ` produces graded evidence for either property.

use std::collections::HashMap;
use std::io::Write;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiplier;
use crate::numerics::{self, CircleGrid, QuadratureConfig, TrigCoeffs};
use crate::blocks::BlockSequence;
use crate::symbols::SymbolSpec;
use crate::weights::WeightSpec;

/// Piecewise-linear window profile over one block, with the modulated values.
#[derive(Clone, Debug)]
pub struct WindowCoefficients {
    /// 1-based window position within the block sequence.
    pub pos: usize,
    /// `[m_(n-1)]`, `[m_n]`, `[m_(n+1)]`.
    pub k_lo: i64,
    pub k_mid: i64,
    pub k_hi: i64,
    /// Ramp weights for `k = k_lo ..= k_hi`; zero at both ends, one at
    /// `k_mid`, linear on each ramp.
    pub betas: Vec<f64>,
    /// `beta_k * value_k`.
    pub values: Vec<f64>,
}

impl WindowCoefficients {
    /// Frequencies and modulated amplitudes as a synthesis-ready map.
    pub fn to_trig_coeffs(&self) -> TrigCoeffs {
        let mut map = TrigCoeffs::new();
        for (i, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                map.insert(self.k_lo + i as i64, Complex64::new(v, 0.0));
            }
        }
        map
    }
}

fn ramp(k: i64, k_lo: i64, k_mid: i64, k_hi: i64) -> f64 {
    if k <= k_mid {
        (k - k_lo) as f64 / (k_mid - k_lo) as f64
    } else {
        (k_hi - k) as f64 / (k_hi - k_mid) as f64
    }
}

/// Builds the window profile at `pos`, pulling per-frequency values from the
/// supplied indexed sequence (multiplier entries or any other coefficients).
pub fn window_coeffs<F>(seq: &BlockSequence, pos: usize, mut values: F) -> Result<WindowCoefficients>
where
    F: FnMut(u64) -> Result<f64>,
{
    let (k_lo, k_mid, k_hi) = seq.floor_triple(pos)?;
    let mut betas = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    let mut vals = Vec::with_capacity(betas.capacity());
    for k in k_lo..=k_hi {
        let b = ramp(k, k_lo, k_mid, k_hi);
        debug_assert!((0.0..=1.0).contains(&b));
        let v = values(k as u64)?;
        betas.push(b);
        vals.push(b * v);
    }
    Ok(WindowCoefficients {
        pos,
        k_lo,
        k_mid,
        k_hi,
        betas,
        values: vals,
    })
}

/// One row of the diagnostic sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WindowNormRecord {
    /// Window position (middle block, 1-based).
    pub n: usize,
    pub m_prev: f64,
    pub m_mid: f64,
    pub m_next: f64,
    /// `∫_0^2π |W_n f_a| dφ`.
    pub l1_norm: f64,
    /// `log(m_n) (|gamma_(k_lo)| + Σ |gamma_k - gamma_(k-1)|)`; an upper
    /// bound for the norm up to a universal constant.
    #[serde(rename = "bound31")]
    pub variation_bound: f64,
    /// `log(m_n) ∫|a| r^(2[m_(n-1)]+1) v / ∫ r^(2[m_(n+1)]+1) v`.
    #[serde(rename = "bound32")]
    pub mass_ratio_bound: f64,
    pub grid_points: usize,
}

/// Sweep policy: grid oversampling, the frequency cap, and the evidence
/// thresholds.
#[derive(Clone, Debug)]
pub struct DiagnoseOptions {
    pub quad: QuadratureConfig,
    /// Circle-grid points per unit frequency (>= 4).
    pub oversample: u32,
    /// Windows whose top frequency exceeds this are not swept.
    pub max_frequency: f64,
    pub thresholds: DiagnoseThresholds,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            oversample: 4,
            max_frequency: 2e5,
            thresholds: DiagnoseThresholds::default(),
        }
    }
}

/// Decision thresholds for the graded verdicts. These are reporting policy,
/// not mathematics; the raw records are always exported alongside.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagnoseThresholds {
    /// Bounded evidence: the last-third max may exceed the earlier max by at
    /// most this factor.
    pub stabilization_factor: f64,
    /// Compact evidence needs `trend_slope` at or below this.
    pub compact_slope: f64,
    /// ... and the last norm at most this fraction of the first.
    pub compact_decay: f64,
}

impl Default for DiagnoseThresholds {
    fn default() -> Self {
        Self {
            stabilization_factor: 1.1,
            compact_slope: -0.1,
            compact_decay: 0.25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    EvidenceFor,
    EvidenceAgainst,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedWindow {
    pub n: usize,
    pub reason: String,
}

/// Full diagnostic sweep outcome.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosisReport {
    pub records: Vec<WindowNormRecord>,
    pub skipped: Vec<SkippedWindow>,
    pub sup_norm: f64,
    /// Least-squares slope of `log l1_norm` against `log n` over the last
    /// half of the sweep.
    pub trend_slope: f64,
    pub verdict_bounded: Evidence,
    pub verdict_compact: Evidence,
}

/// `∫_0^2π |W_n f_a| dφ` plus the two upper-bound evaluations for one window.
pub fn window_l1(
    w: &WeightSpec,
    a: &SymbolSpec,
    seq: &BlockSequence,
    pos: usize,
    opts: &DiagnoseOptions,
) -> Result<WindowNormRecord> {
    let mut plain = |k: u64| multiplier::gamma(w, a, k as usize, &opts.quad);
    window_record(w, a, seq, pos, opts, &mut plain)
}

fn window_record(
    w: &WeightSpec,
    a: &SymbolSpec,
    seq: &BlockSequence,
    pos: usize,
    opts: &DiagnoseOptions,
    gamma_of: &mut dyn FnMut(u64) -> Result<f64>,
) -> Result<WindowNormRecord> {
    let (k_lo, _, k_hi) = seq.floor_triple(pos)?;
    if k_hi > 1 << 32 {
        return Err(Error::Overflow(format!(
            "window top frequency {k_hi} is far past any feasible grid"
        )));
    }
    let mut gammas = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    for k in k_lo..=k_hi {
        gammas.push(gamma_of(k as u64)?);
    }
    let wc = window_coeffs(seq, pos, |k| Ok(gammas[(k as i64 - k_lo) as usize]))?;
    let grid = CircleGrid::for_max_frequency(k_hi as u64, opts.oversample.max(4));
    let l1 = numerics::l1_circle_norm(&wc.to_trig_coeffs(), &grid)?;
    let (m_prev, m_mid, m_next) = seq.triple(pos)?;
    let variation = variation_bound_from(&gammas, m_mid);
    let mass = mass_bound_parts(w, a, k_lo, k_hi, m_mid, &opts.quad)?;
    Ok(WindowNormRecord {
        n: pos,
        m_prev,
        m_mid,
        m_next,
        l1_norm: l1,
        variation_bound: variation,
        mass_ratio_bound: mass,
        grid_points: grid.num_points,
    })
}

fn variation_bound_from(gammas: &[f64], m_mid: f64) -> f64 {
    let mut bracket = gammas[0].abs();
    for w in gammas.windows(2) {
        bracket += (w[1] - w[0]).abs();
    }
    m_mid.ln().max(0.0) * bracket
}

fn mass_bound_parts(
    w: &WeightSpec,
    a: &SymbolSpec,
    k_lo: i64,
    k_hi: i64,
    m_mid: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let e_lo = 2.0 * k_lo as f64 + 1.0;
    let e_hi = 2.0 * k_hi as f64 + 1.0;
    let mut seeds = w.moment_seeds(e_lo)?;
    seeds.extend(a.breakpoints());
    let log_num = numerics::integrate_log_weighted(
        |r| e_lo * r.ln() + w.lw(r),
        |r| a.ev(r).abs(),
        0.0,
        &seeds,
        cfg,
    )?;
    let log_den = w.log_moment(e_hi, cfg)?;
    Ok(m_mid.ln().max(0.0) * (log_num - log_den).exp())
}

/// The variation-type norm bound alone.
pub fn gamma_variation_bound(
    w: &WeightSpec,
    a: &SymbolSpec,
    seq: &BlockSequence,
    pos: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (k_lo, _, k_hi) = seq.floor_triple(pos)?;
    let mut gammas = Vec::new();
    for k in k_lo..=k_hi {
        gammas.push(multiplier::gamma(w, a, k as usize, cfg)?);
    }
    let (_, m_mid, _) = seq.triple(pos)?;
    Ok(variation_bound_from(&gammas, m_mid))
}

/// The weighted-mass norm bound alone.
pub fn weighted_mass_bound(
    w: &WeightSpec,
    a: &SymbolSpec,
    seq: &BlockSequence,
    pos: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (k_lo, _, k_hi) = seq.floor_triple(pos)?;
    let (_, m_mid, _) = seq.triple(pos)?;
    mass_bound_parts(w, a, k_lo, k_hi, m_mid, cfg)
}

/// Sweeps the windows in `n_range` (defaults to every admissible position
/// whose top frequency respects `opts.max_frequency`) and grades the
/// evidence. Ramp-degenerate windows are skipped with a notice.
pub fn diagnose(
    w: &WeightSpec,
    a: &SymbolSpec,
    seq: &BlockSequence,
    n_range: Option<(usize, usize)>,
    opts: &DiagnoseOptions,
) -> Result<DiagnosisReport> {
    if seq.len() < 3 {
        return Err(Error::InvalidParams(
            "diagnosis needs at least three block indices".into(),
        ));
    }
    let (lo_req, hi_req) = n_range.unwrap_or((2, seq.len() - 1));
    let lo = lo_req.max(2);
    let mut hi = hi_req.min(seq.len() - 1);
    while hi >= lo && seq.entries[hi].m > opts.max_frequency {
        hi -= 1;
    }
    if lo > hi {
        return Err(Error::InvalidParams(format!(
            "no admissible windows in range {lo_req}..={hi_req} under frequency cap {}",
            opts.max_frequency
        )));
    }
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut cached = |k: u64| -> Result<f64> {
        if let Some(&g) = cache.get(&k) {
            return Ok(g);
        }
        let g = multiplier::gamma(w, a, k as usize, &opts.quad)?;
        cache.insert(k, g);
        Ok(g)
    };
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for pos in lo..=hi {
        match window_record(w, a, seq, pos, opts, &mut cached) {
            Ok(rec) => records.push(rec),
            Err(Error::DegenerateBlock {
                m_prev,
                m_mid,
                m_next,
                ..
            }) => skipped.push(SkippedWindow {
                n: pos,
                reason: format!("integer parts collide: ({m_prev}, {m_mid}, {m_next})"),
            }),
            Err(e) => return Err(e),
        }
    }
    if records.is_empty() {
        return Err(Error::InvalidParams(
            "every window in range was degenerate".into(),
        ));
    }
    let sup_norm = records.iter().map(|r| r.l1_norm).fold(0.0, f64::max);
    let trend_slope = slope_of_tail(&records);
    let (verdict_bounded, verdict_compact) = grade(&records, trend_slope, &opts.thresholds);
    Ok(DiagnosisReport {
        records,
        skipped,
        sup_norm,
        trend_slope,
        verdict_bounded,
        verdict_compact,
    })
}

fn slope_of_tail(records: &[WindowNormRecord]) -> f64 {
    let start = records.len() / 2;
    let pts: Vec<(f64, f64)> = records[start..]
        .iter()
        .map(|r| ((r.n as f64).ln(), r.l1_norm.max(1e-300).ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    }
}

fn grade(
    records: &[WindowNormRecord],
    slope: f64,
    th: &DiagnoseThresholds,
) -> (Evidence, Evidence) {
    if records.len() < 4 {
        return (Evidence::Inconclusive, Evidence::Inconclusive);
    }
    let split = records.len() - (records.len() / 3).max(1);
    let early_max = records[..split].iter().map(|r| r.l1_norm).fold(0.0, f64::max);
    let late = &records[split..];
    let late_max = late.iter().map(|r| r.l1_norm).fold(0.0, f64::max);
    let bounded = if late_max <= th.stabilization_factor * early_max {
        Evidence::EvidenceFor
    } else if late_max > 2.0 * early_max
        && late.windows(2).all(|w| w[1].l1_norm >= w[0].l1_norm)
    {
        Evidence::EvidenceAgainst
    } else {
        Evidence::Inconclusive
    };
    let first = records[0].l1_norm;
    let last = records[records.len() - 1].l1_norm;
    // exact zero counts as fully decayed regardless of the slope fit
    let decayed = last == 0.0 || (slope <= th.compact_slope && last <= th.compact_decay * first);
    let compact = if decayed {
        Evidence::EvidenceFor
    } else if slope >= th.compact_slope / 2.0 && last >= 0.5 * first {
        Evidence::EvidenceAgainst
    } else {
        Evidence::Inconclusive
    };
    (bounded, compact)
}

/// Normalized circle mean `M1` of the all-ones window (the trapezoidal
/// kernel itself): `(1/2π) ∫ |Σ beta_k e^(ikφ)| dφ`. Its running sup over
/// positions is the uniform-kernel statistic behind the norm bounds.
pub fn vdp_kernel_m1(seq: &BlockSequence, pos: usize, oversample: u32) -> Result<f64> {
    let wc = window_coeffs(seq, pos, |_| Ok(1.0))?;
    let grid = CircleGrid::for_max_frequency(wc.k_hi as u64, oversample.max(4));
    let l1 = numerics::l1_circle_norm(&wc.to_trig_coeffs(), &grid)?;
    Ok(l1 / std::f64::consts::TAU)
}

/// `∫|Q_m f| / (log m ∫|f|)` where `Q_m` keeps frequencies `0 ..= m`. The
/// ratio is bounded by a constant uniformly in `m` and `f`.
pub fn partial_sum_l1_ratio(coeffs: &TrigCoeffs, m: u64, oversample: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidParams(
            "partial-sum ratio needs m >= 2 for a positive log factor".into(),
        ));
    }
    let k_max = coeffs
        .iter()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(k, _)| k.unsigned_abs())
        .max()
        .unwrap_or(0);
    let grid = CircleGrid::for_max_frequency(k_max, oversample.max(4));
    let full = numerics::l1_circle_norm(coeffs, &grid)?;
    if full == 0.0 {
        return Err(Error::DivisionDegenerate("zero series".into()));
    }
    let truncated: TrigCoeffs = coeffs
        .iter()
        .filter(|(&k, _)| k >= 0 && k as u64 <= m)
        .map(|(&k, &c)| (k, c))
        .collect();
    let part = numerics::l1_circle_norm(&truncated, &grid)?;
    Ok(part / ((m as f64).ln() * full))
}

/// `∫|g| / (log n (|alpha_0| + Σ|alpha_k - alpha_(k-1)|) ∫|f|)` for
/// `f = Σ b_k e^(ikφ)` and the modulated `g = Σ alpha_k b_k e^(ikφ)`.
pub fn modulated_l1_ratio(
    b: &[Complex64],
    alpha: &[Complex64],
    oversample: u32,
) -> Result<f64> {
    if b.len() != alpha.len() {
        return Err(Error::InvalidParams(
            "coefficient and modulation sequences must have matching lengths".into(),
        ));
    }
    let n = b.len().saturating_sub(1);
    if n < 2 {
        return Err(Error::InvalidParams(
            "modulated ratio needs degree >= 2 for a positive log factor".into(),
        ));
    }
    let mut variation = alpha[0].norm();
    for w in alpha.windows(2) {
        variation += (w[1] - w[0]).norm();
    }
    let f: TrigCoeffs = b.iter().enumerate().map(|(k, &c)| (k as i64, c)).collect();
    let g: TrigCoeffs = b
        .iter()
        .zip(alpha.iter())
        .enumerate()
        .map(|(k, (&c, &al))| (k as i64, c * al))
        .collect();
    let grid = CircleGrid::for_max_frequency(n as u64, oversample.max(4));
    let f_norm = numerics::l1_circle_norm(&f, &grid)?;
    if f_norm == 0.0 || variation == 0.0 {
        return Err(Error::DivisionDegenerate(
            "zero series or zero modulation variation".into(),
        ));
    }
    let g_norm = numerics::l1_circle_norm(&g, &grid)?;
    Ok(g_norm / ((n as f64).ln() * variation * f_norm))
}

/// Writes the per-window records as plot-ready CSV.
pub fn write_records_csv<W: Write>(records: &[WindowNormRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,m_prev,m_mid,m_next,l1_norm,bound31,bound32")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.m_prev, r.m_mid, r.m_next, r.l1_norm, r.variation_bound, r.mass_ratio_bound
        )?;
    }
    Ok(())
}
