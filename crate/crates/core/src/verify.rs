//! Seeded randomized verification of the supporting inequalities: multiplier
//! monotonicity for decreasing symbols, the partial-sum and modulated-series
//! L1 bounds, tail dominance of exponential moments, the shifted-moment
//! ratio, and the discrete/boundary sup comparison.
//!
//! Every check is deterministic under a fixed seed and reports the scanned
//! scale, the extremal statistic and a pass flag; `pass == false` means a
//! margin or stability threshold was breached at the scanned scale, nothing
//! stronger.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::multiplier;
use crate::numerics::{self, QuadratureConfig};
use crate::symbols::{SymbolSpec, TruncSide};
use crate::weights::{Witness, WeightSpec};
use crate::window;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Human description of the scanned scale.
    pub scale: String,
    /// The extremal statistic the pass decision is based on.
    pub statistic: f64,
    /// Pass boundary for the statistic.
    pub threshold: f64,
    pub pass: bool,
    pub details: Vec<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

// ---------------------------------------------------------------------------
// Random symbol generators
// ---------------------------------------------------------------------------

/// Non-increasing nonnegative step symbol: a positive combination of
/// low-side truncated constants.
pub fn random_decreasing_step(rng: &mut ChaCha8Rng) -> SymbolSpec {
    let pieces = rng.random_range(1..=6usize);
    let mut cuts: Vec<f64> = (0..pieces)
        .map(|_| rng.random_range(0.05..0.995))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let terms = cuts
        .into_iter()
        .map(|s| {
            let inc = rng.random_range(0.1..1.0);
            (
                inc,
                SymbolSpec::truncated(SymbolSpec::constant(1.0), s, TruncSide::Lo)
                    .expect("cut inside (0, 1)"),
            )
        })
        .collect();
    SymbolSpec::ScaledSum(terms)
}

/// Non-increasing nonnegative tabulated symbol with strictly decreasing
/// knot values.
pub fn random_decreasing_tabulated(rng: &mut ChaCha8Rng) -> SymbolSpec {
    let knots = rng.random_range(5..=10usize);
    let mut rs = Vec::with_capacity(knots);
    let mut acc = 0.0;
    for _ in 0..knots {
        acc += rng.random_range(0.02..1.0);
        rs.push(acc);
    }
    let top = *rs.last().unwrap();
    for r in rs.iter_mut() {
        *r *= 0.99 / top;
    }
    rs.insert(0, 0.0);
    let mut value = rng.random_range(0.5..2.0);
    let mut vs = Vec::with_capacity(rs.len());
    for _ in 0..rs.len() {
        vs.push(value);
        value *= rng.random_range(0.3..0.95);
    }
    SymbolSpec::tabulated("random", rs, vs).expect("valid random table")
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// Monotonicity of the consecutive-exponent moment ratios for randomized
/// non-increasing nonnegative symbols across the given weights.
pub fn check_multiplier_monotonicity(
    weights: &[WeightSpec],
    seed: u64,
    num_symbols: usize,
    k_max: usize,
    cfg: &QuadratureConfig,
) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut worst_at = (String::new(), 0usize);
    for i in 0..num_symbols {
        let a = if i % 2 == 0 {
            random_decreasing_step(&mut rng)
        } else {
            random_decreasing_tabulated(&mut rng)
        };
        for w in weights {
            let rep = multiplier::check_monotonicity(w, &a, k_max, cfg)?;
            if rep.worst_margin < worst {
                worst = rep.worst_margin;
                worst_at = (w.to_string(), rep.worst_k);
            }
        }
    }
    let threshold = -1e-8;
    Ok(CheckResult {
        name: "multiplier_monotonicity".into(),
        scale: format!(
            "{num_symbols} random non-increasing symbols x {} weights, exponents <= {k_max}",
            weights.len()
        ),
        statistic: worst,
        threshold,
        pass: worst >= threshold,
        details: vec![
            Witness::new("worst_margin", worst),
            Witness::new("worst_exponent", worst_at.1 as f64),
        ],
    })
}

fn not_monotone_growing(stats: &[f64]) -> bool {
    !stats.windows(2).all(|w| w[1] > w[0] * 1.02)
}

/// Partial-sum projection bound: `∫|Q_m f| <= d log m ∫|f|` over random
/// coefficient sets. The per-level maxima of the normalized ratio must not
/// grow monotonically with `m`.
pub fn check_partial_sum_projection(
    seed: u64,
    trials: usize,
    ms: &[u64],
) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level_max = Vec::with_capacity(ms.len());
    for &m in ms {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let top = 4 * m;
            let mut coeffs = numerics::TrigCoeffs::new();
            for k in 0..=top {
                coeffs.insert(k as i64, random_complex(&mut rng));
            }
            let r = window::partial_sum_l1_ratio(&coeffs, m, 4)?;
            worst = worst.max(r);
        }
        level_max.push(worst);
    }
    let statistic = level_max.iter().cloned().fold(0.0, f64::max);
    let pass = not_monotone_growing(&level_max);
    let details = ms
        .iter()
        .zip(level_max.iter())
        .map(|(&m, &d)| Witness::new(format!("max_ratio_m_{m}"), d))
        .collect();
    Ok(CheckResult {
        name: "partial_sum_projection".into(),
        scale: format!("{trials} trials per m in {ms:?}, support 4m"),
        statistic,
        threshold: statistic.max(1.0),
        pass,
        details,
    })
}

/// Modulated-series bound: `∫|g| <= c log n (|alpha_0| + Σ|Δalpha|) ∫|f|`
/// over random coefficient and modulation sequences.
pub fn check_coefficient_modulation(
    seed: u64,
    trials: usize,
    ns: &[usize],
) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level_max = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let b: Vec<Complex64> = (0..=n).map(|_| random_complex(&mut rng)).collect();
            let alpha: Vec<Complex64> = (0..=n).map(|_| random_complex(&mut rng)).collect();
            let r = window::modulated_l1_ratio(&b, &alpha, 4)?;
            worst = worst.max(r);
        }
        level_max.push(worst);
    }
    let statistic = level_max.iter().cloned().fold(0.0, f64::max);
    let pass = not_monotone_growing(&level_max);
    let details = ns
        .iter()
        .zip(level_max.iter())
        .map(|(&n, &d)| Witness::new(format!("max_ratio_n_{n}"), d))
        .collect();
    Ok(CheckResult {
        name: "coefficient_modulation".into(),
        scale: format!("{trials} trials per n in {ns:?}"),
        statistic,
        threshold: statistic.max(1.0),
        pass,
        details,
    })
}

/// Tail dominance for exponential weights: with `j = j(k)` the peak index
/// and `delta = 1/2`, the whole moment is controlled by the tail integral
/// over `[1 - 1/(delta j), 1)`. The constant fitted at `k_fit` must keep
/// dominating (within a factor 2) across the scanned range.
pub fn check_tail_dominance(
    alpha: f64,
    beta: f64,
    k_fit: f64,
    k_max: f64,
    cfg: &QuadratureConfig,
) -> Result<CheckResult> {
    let delta = 0.5;
    let w = WeightSpec::exponential(alpha, beta)?;
    let d_at = |k: f64| -> Result<f64> {
        let j = crate::weights::solve_peak_index(alpha, beta, k)?;
        let lo = (1.0 - 1.0 / (delta * j)).max(0.0);
        let full = w.log_moment(k, cfg)?;
        let tail = w.log_moment_from(k, lo, cfg)?;
        Ok((full - tail).exp())
    };
    let d_fit = d_at(k_fit)?;
    let mut k = k_fit;
    let mut worst = 0.0f64;
    let mut details = vec![Witness::new("d_fit", d_fit)];
    while k <= k_max * (1.0 + 1e-12) {
        let d = d_at(k)?;
        worst = worst.max(d / d_fit);
        k *= 1.5;
    }
    details.push(Witness::new("max_ratio_to_fit", worst));
    Ok(CheckResult {
        name: "tail_dominance".into(),
        scale: format!("exp({alpha},{beta}), delta=1/2, k in [{k_fit}, {k_max}]"),
        statistic: worst,
        threshold: 2.0,
        pass: worst <= 2.0,
        details,
    })
}

/// Shifted-moment ratio `I_(k - k^(1/(beta+1))) / I_k` for exponential
/// weights: bounded over the range, within a factor 2 of its value at `k_fit`.
pub fn check_shifted_moment_ratio(
    alpha: f64,
    beta: f64,
    k_fit: f64,
    k_max: f64,
    cfg: &QuadratureConfig,
) -> Result<CheckResult> {
    let w = WeightSpec::exponential(alpha, beta)?;
    let eps = 1.0 / (beta + 1.0);
    let ratio_at = |k: f64| -> Result<f64> {
        let shifted = (k - k.powf(eps)).max(0.0);
        Ok((w.log_moment(shifted, cfg)? - w.log_moment(k, cfg)?).exp())
    };
    let r_fit = ratio_at(k_fit)?;
    let mut worst = 0.0f64;
    let mut sup_all = 0.0f64;
    let mut k = 1.0;
    while k <= k_max * (1.0 + 1e-12) {
        let r = ratio_at(k)?;
        sup_all = sup_all.max(r);
        if k >= k_fit {
            worst = worst.max(r / r_fit);
        }
        k *= 1.5;
    }
    Ok(CheckResult {
        name: "shifted_moment_ratio".into(),
        scale: format!("exp({alpha},{beta}), k in [1, {k_max}], fitted at {k_fit}"),
        statistic: worst,
        threshold: 2.0,
        pass: worst <= 2.0 && sup_all.is_finite(),
        details: vec![
            Witness::new("ratio_fit", r_fit),
            Witness::new("sup_over_full_range", sup_all),
            Witness::new("max_ratio_to_fit", worst),
        ],
    })
}

/// Two-sided comparison between the boundary statistic
/// `sup_r |a(r)| w(r)` and its discrete counterpart
/// `sup_n sup_r |a(r)| r^n g(n)`, where `(w, g)` is either
/// `(|log(1-r)|, log n)` or `((1-r)^-eps, n^eps)`. The fitted comparison
/// constant must be stable when the scanned n-range doubles.
pub fn check_discrete_sup_comparison(
    a: &SymbolSpec,
    power_eps: Option<f64>,
    delta: f64,
    n_hi: usize,
) -> Result<CheckResult> {
    let boundary_sup = {
        let mut sup = 0.0f64;
        for i in 0..=240 {
            let eps = 10f64.powf(-12.0 * i as f64 / 240.0).min(1.0 - delta);
            let r = 1.0 - eps;
            if r < delta {
                continue;
            }
            let weight = match power_eps {
                None => -eps.ln(),
                Some(e) => eps.powf(-e),
            };
            sup = sup.max((a.ev(r) * weight).abs());
        }
        sup
    };
    let discrete_sup_to = |top: usize| -> f64 {
        let n0 = (1.0 / (1.0 - delta)).ceil() as usize;
        let mut sup = 0.0f64;
        let mut n = n0.max(2);
        while n <= top {
            let factor = match power_eps {
                None => (n as f64).ln(),
                Some(e) => (n as f64).powf(e),
            };
            sup = sup.max(a.discrete_sup(n as f64, delta) * factor);
            n = (n as f64 * 1.4).ceil() as usize;
        }
        sup
    };
    let s1 = discrete_sup_to(n_hi);
    let s2 = discrete_sup_to(2 * n_hi);
    let c1 = boundary_sup / s1;
    let c2 = boundary_sup / s2;
    let stability = c1 / c2;
    let pass = stability <= 2.0 && c1.is_finite() && c2 > 0.0;
    Ok(CheckResult {
        name: match power_eps {
            None => "discrete_sup_log_comparison".into(),
            Some(e) => format!("discrete_sup_power_comparison_eps_{e}"),
        },
        scale: format!("{a}, n up to {} (doubled range)", 2 * n_hi),
        statistic: stability,
        threshold: 2.0,
        pass,
        details: vec![
            Witness::new("boundary_sup", boundary_sup),
            Witness::new("fitted_constant", c1),
            Witness::new("fitted_constant_doubled_range", c2),
        ],
    })
}

/// The full deterministic suite for one weight.
pub fn run_verification_suite(
    seed: u64,
    weight: &WeightSpec,
    trials: usize,
    num_symbols: usize,
    cfg: &QuadratureConfig,
) -> Result<VerifySummary> {
    let mut checks = Vec::new();
    checks.push(check_multiplier_monotonicity(
        std::slice::from_ref(weight),
        seed,
        num_symbols,
        200,
        cfg,
    )?);
    checks.push(check_partial_sum_projection(seed, trials, &[8, 32, 128])?);
    checks.push(check_coefficient_modulation(seed, trials, &[8, 32, 128])?);
    let (alpha, beta) = match weight {
        WeightSpec::Exponential { alpha, beta } => (*alpha, *beta),
        _ => (1.0, 1.0),
    };
    checks.push(check_tail_dominance(alpha, beta, 100.0, 1e4, cfg)?);
    checks.push(check_shifted_moment_ratio(alpha, beta, 100.0, 1e4, cfg)?);
    checks.push(check_discrete_sup_comparison(
        &SymbolSpec::InvLog,
        None,
        0.0,
        512,
    )?);
    checks.push(check_discrete_sup_comparison(
        &SymbolSpec::power_decay(0.5)?,
        Some(0.25),
        0.0,
        512,
    )?);
    Ok(VerifySummary { seed, checks })
}
