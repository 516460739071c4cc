//! Quadrature and trigonometric-series evaluation engine.
//!
//! Every integral in this crate is of the form `∫ over [lo, 1)` of a positive
//! kernel `r^k v(r)`, optionally times a bounded factor. The mass concentrates
//! at the right endpoint, so the integrators use a fixed-order Gauss rule on a
//! geometrically graded mesh accumulating toward `r = 1`. Seed points force
//! panel boundaries at interior peaks (sharply localized kernels of
//! exponential weights) and at symbol breakpoints, with local geometric
//! refinement around each seed.
//!
//! Ratios of integrals that underflow in linear arithmetic are computed with
//! a shared log-domain shift: both numerator and denominator are accumulated
//! as `Σ w_i exp(g_i - S) f_i` with `S` the node maximum of the log kernel.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Order of the per-panel Gauss-Legendre rule.
const GAUSS_ORDER: usize = 16;

/// Controls mesh construction and the tail acceptance test.
#[derive(Clone, Debug)]
pub struct QuadratureConfig {
    /// Relative tolerance for the tail certificate.
    pub rel_tol: f64,
    /// Cap on the length of the geometric ladder toward `r = 1`.
    pub max_subdivisions: usize,
    /// Mesh ratio in (0, 1); each ladder panel is this fraction of the
    /// remaining distance to 1.
    pub grading_ratio: f64,
    /// Smallest panel width the ladder descends to.
    pub min_panel_width: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_subdivisions: 200,
            grading_ratio: 0.5,
            min_panel_width: 1e-15,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParams("rel_tol must be positive".into()));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::InvalidParams(
                "grading_ratio must lie in (0, 1)".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParams(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.min_panel_width > 0.0) {
            return Err(Error::InvalidParams(
                "min_panel_width must be positive".into(),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rule
// ---------------------------------------------------------------------------

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of the Gauss-Legendre rule on [-1, 1], computed once by
/// Newton iteration on the Legendre recurrence.
fn gauss_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut xs = vec![0.0; n];
        let mut ws = vec![0.0; n];
        for i in 0..n {
            let mut x =
                (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_pair(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, x);
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        xs.reverse();
        ws.reverse();
        (xs, ws)
    })
}

// ---------------------------------------------------------------------------
// Mesh construction
// ---------------------------------------------------------------------------

/// Breakpoints of the graded mesh on [lo, 1): a geometric ladder accumulating
/// toward 1 plus two-sided geometric refinement around each seed.
fn build_breakpoints(lo: f64, seeds: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(0.0..1.0).contains(&lo) {
        return Err(Error::OutOfDomain(format!(
            "integration start {lo} outside [0, 1)"
        )));
    }
    let span = 1.0 - lo;
    let mut pts = Vec::with_capacity(160);
    pts.push(lo);
    let mut width = span * cfg.grading_ratio;
    let mut steps = 0usize;
    while width >= cfg.min_panel_width {
        pts.push(1.0 - width);
        width *= cfg.grading_ratio;
        steps += 1;
        if steps >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                lo,
                panels: steps,
                tail_ratio: width / span,
            });
        }
    }
    for &s in seeds {
        if s <= lo + cfg.min_panel_width || s >= 1.0 - cfg.min_panel_width {
            continue;
        }
        pts.push(s);
        // Halving rungs on both sides of the seed; depth bounded relative to
        // the seed's own distance to the boundary.
        let mut d = 0.5 * (1.0 - s);
        let floor = cfg.min_panel_width.max((1.0 - s) * 1e-6);
        while d >= floor {
            if s - d > lo {
                pts.push(s - d);
            }
            pts.push(s + d);
            d *= cfg.grading_ratio;
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < cfg.min_panel_width * 0.5);
    Ok(pts)
}

fn panel_nodes(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let (xs, ws) = gauss_rule();
    let hw = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    xs.iter()
        .zip(ws.iter())
        .map(move |(&x, &w)| (mid + hw * x, w * hw))
}

// ---------------------------------------------------------------------------
// Plain integrator
// ---------------------------------------------------------------------------

/// `∫_0^1 f(r) dr` on the graded mesh.
///
/// The result carries a tail certificate: the last ladder panel (nearest 1)
/// must contribute less than `rel_tol` of the accumulated mass, otherwise the
/// integral is reported as non-convergent. Accuracy at `rel_tol` is certified
/// for integrands of the form polynomial times weight; integrable endpoint
/// singularities are truncated at the final panel width.
pub fn integrate_01<F>(f: F, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_01_seeded(f, &[], cfg)
}

/// Same as [`integrate_01`] with extra panel boundaries forced at `seeds`.
pub fn integrate_01_seeded<F>(f: F, seeds: &[f64], cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let pts = build_breakpoints(0.0, seeds, cfg)?;
    if pts.len() < 2 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut last_panel = 0.0;
    for win in pts.windows(2) {
        let mut acc = 0.0;
        for (r, w) in panel_nodes(win[0], win[1]) {
            let v = f(r);
            if !v.is_finite() {
                return Err(Error::InvalidDomain { r });
            }
            acc += w * v;
        }
        last_panel = acc;
        total += acc;
    }
    if last_panel.abs() > cfg.rel_tol * total.abs() {
        return Err(Error::NonConvergence {
            lo: 0.0,
            panels: pts.len() - 1,
            tail_ratio: last_panel.abs() / total.abs().max(f64::MIN_POSITIVE),
        });
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Log-domain integrators
// ---------------------------------------------------------------------------

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `ln ∫_lo^1 exp(log_f(r)) dr`.
///
/// The kernel may return `-inf` (zero integrand) anywhere; `NaN` or `+inf`
/// are reported as [`Error::InvalidDomain`].
pub fn integrate_log<G>(log_f: G, lo: f64, seeds: &[f64], cfg: &QuadratureConfig) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let pts = build_breakpoints(lo, seeds, cfg)?;
    if pts.len() < 2 {
        return Ok(f64::NEG_INFINITY);
    }
    let mut log_total = f64::NEG_INFINITY;
    let mut last_panel = f64::NEG_INFINITY;
    for win in pts.windows(2) {
        let hw = 0.5 * (win[1] - win[0]);
        let mut panel_max = f64::NEG_INFINITY;
        let mut nodes = [(0.0, 0.0); GAUSS_ORDER];
        for (slot, (r, w)) in nodes.iter_mut().zip(panel_nodes(win[0], win[1])) {
            let g = log_f(r);
            if g.is_nan() || g == f64::INFINITY {
                return Err(Error::InvalidDomain { r });
            }
            panel_max = panel_max.max(g);
            *slot = (g, w);
        }
        let panel_log = if panel_max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            let mut s = 0.0;
            for &(g, w) in &nodes {
                s += w * (g - panel_max).exp();
            }
            // w already carries the half-width factor; hw only guards s == 0.
            if s <= 0.0 {
                let _ = hw;
                f64::NEG_INFINITY
            } else {
                panel_max + s.ln()
            }
        };
        last_panel = panel_log;
        log_total = log_add(log_total, panel_log);
    }
    if log_total != f64::NEG_INFINITY && last_panel > log_total + cfg.rel_tol.ln() {
        return Err(Error::NonConvergence {
            lo,
            panels: pts.len() - 1,
            tail_ratio: (last_panel - log_total).exp(),
        });
    }
    Ok(log_total)
}

/// Ratio `∫ exp(g) f dr / ∫ exp(g) dr` over `[lo, 1)` with both integrals
/// accumulated on the same nodes under a common log-domain shift.
#[derive(Clone, Copy, Debug)]
pub struct RatioIntegral {
    /// The weighted mean of `f` under the kernel.
    pub ratio: f64,
    /// `ln ∫ exp(g) dr`, usable even when the linear value underflows.
    pub log_denominator: f64,
}

pub fn integrate_ratio<G, F>(
    log_kernel: G,
    factor: F,
    lo: f64,
    seeds: &[f64],
    cfg: &QuadratureConfig,
) -> Result<RatioIntegral>
where
    G: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    let pts = build_breakpoints(lo, seeds, cfg)?;
    if pts.len() < 2 {
        return Err(Error::DenominatorUnderflow { exponent: f64::NAN });
    }
    let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity((pts.len() - 1) * GAUSS_ORDER);
    let mut shift = f64::NEG_INFINITY;
    for win in pts.windows(2) {
        for (r, w) in panel_nodes(win[0], win[1]) {
            let g = log_kernel(r);
            if g.is_nan() || g == f64::INFINITY {
                return Err(Error::InvalidDomain { r });
            }
            shift = shift.max(g);
            nodes.push((r, w, g));
        }
    }
    if shift == f64::NEG_INFINITY {
        return Err(Error::DenominatorUnderflow { exponent: f64::NAN });
    }
    let mut den = 0.0;
    let mut num = 0.0;
    for &(r, w, g) in &nodes {
        let e = (g - shift).exp();
        if e == 0.0 {
            continue;
        }
        let fv = factor(r);
        if !fv.is_finite() {
            return Err(Error::InvalidDomain { r });
        }
        den += w * e;
        num += w * e * fv;
    }
    if den <= 0.0 {
        return Err(Error::DenominatorUnderflow { exponent: shift });
    }
    Ok(RatioIntegral {
        ratio: num / den,
        log_denominator: shift + den.ln(),
    })
}

/// `ln ∫_lo^1 exp(g(r)) f(r) dr` for a nonnegative factor `f`.
pub fn integrate_log_weighted<G, F>(
    log_kernel: G,
    factor: F,
    lo: f64,
    seeds: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    let pts = build_breakpoints(lo, seeds, cfg)?;
    if pts.len() < 2 {
        return Ok(f64::NEG_INFINITY);
    }
    let mut shift = f64::NEG_INFINITY;
    let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity((pts.len() - 1) * GAUSS_ORDER);
    for win in pts.windows(2) {
        for (r, w) in panel_nodes(win[0], win[1]) {
            let g = log_kernel(r);
            if g.is_nan() || g == f64::INFINITY {
                return Err(Error::InvalidDomain { r });
            }
            shift = shift.max(g);
            nodes.push((r, w, g));
        }
    }
    if shift == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let mut acc = 0.0;
    for &(r, w, g) in &nodes {
        let e = (g - shift).exp();
        if e == 0.0 {
            continue;
        }
        let fv = factor(r);
        if !fv.is_finite() || fv < 0.0 {
            return Err(Error::InvalidDomain { r });
        }
        acc += w * e * fv;
    }
    if acc <= 0.0 {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok(shift + acc.ln())
    }
}

// ---------------------------------------------------------------------------
// Circle L1 norms
// ---------------------------------------------------------------------------

/// Finite trigonometric sum, frequency -> complex amplitude.
pub type TrigCoeffs = BTreeMap<i64, Complex64>;

/// Equispaced sampling grid on `[0, 2π)`.
#[derive(Clone, Copy, Debug)]
pub struct CircleGrid {
    pub num_points: usize,
}

impl CircleGrid {
    /// Minimal admissible point count for frequencies up to `k_max`.
    pub fn required_points(k_max: u64) -> usize {
        4 * k_max as usize + 64
    }

    /// Grid with `oversample * k_max + 64` points; `oversample >= 4` keeps
    /// the Riemann sum of `|p|` accurate for degree-`k_max` polynomials.
    pub fn for_max_frequency(k_max: u64, oversample: u32) -> Self {
        Self {
            num_points: oversample as usize * k_max as usize + 64,
        }
    }
}

fn max_nonzero_frequency(coeffs: &TrigCoeffs) -> u64 {
    coeffs
        .iter()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(k, _)| k.unsigned_abs())
        .max()
        .unwrap_or(0)
}

/// `∫_0^{2π} |Σ_k c_k e^{ikφ}| dφ` by FFT synthesis and a Riemann sum.
///
/// Synthesis costs `O(M log M)` in the grid size. Fails with
/// [`Error::UndersampledGrid`] when the grid violates the oversampling rule.
pub fn l1_circle_norm(coeffs: &TrigCoeffs, grid: &CircleGrid) -> Result<f64> {
    let k_max = max_nonzero_frequency(coeffs);
    let required = CircleGrid::required_points(k_max);
    let m = grid.num_points;
    if m < required {
        return Err(Error::UndersampledGrid {
            num_points: m,
            k_max,
            required,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (&k, &c) in coeffs {
        let idx = k.rem_euclid(m as i64) as usize;
        buf[idx] += c;
    }
    // Unnormalized inverse transform: X_j = Σ_k x_k e^{+2πi kj/m}, exactly
    // the synthesis of the trigonometric sum at φ_j = 2πj/m.
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let sum: f64 = buf.iter().map(|z| z.norm()).sum();
    Ok(sum * std::f64::consts::TAU / m as f64)
}

// ---------------------------------------------------------------------------
// Monotone piecewise-cubic interpolation (Fritsch-Carlson)
// ---------------------------------------------------------------------------

/// C1 piecewise-cubic interpolant that preserves local monotonicity of the
/// data. Evaluation outside the knot range extends constantly.
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidParams(
                "interpolation needs at least two matching samples".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams(
                "interpolation abscissae must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                ds[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        ds[0] = edge_slope(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        ds[n - 1] = edge_slope(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            delta[n - 2],
            if n >= 3 { delta[n - 3] } else { delta[n - 2] },
        );
        Ok(Self { xs, ys, ds })
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= *self.xs.last().unwrap() {
            return *self.ys.last().unwrap();
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if x <= self.xs[0] || x >= *self.xs.last().unwrap() {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        dh00 * self.ys[i] + dh10 * self.ds[i] + dh01 * self.ys[i + 1] + dh11 * self.ds[i + 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // Three-point one-sided estimate, clipped to keep monotonicity.
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

// ---------------------------------------------------------------------------
// Line search
// ---------------------------------------------------------------------------

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximizer on `[lo, hi]`.
///
/// Ties favour the left side, so on a plateau the bracket converges to the
/// smallest maximizer. Returns `(argmax, max)`.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if hi <= lo {
        return (lo, f(lo));
    }
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Coarse scan followed by a golden-section polish; robust for objectives
/// that are only piecewise unimodal.
pub fn scan_then_golden_max<F>(f: F, lo: f64, hi: f64, scan: usize, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if hi <= lo {
        return (lo, f(lo));
    }
    let n = scan.max(3);
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    let step = (hi - lo) / (n as f64 - 1.0);
    for i in 0..n {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = if best_i == 0 { lo } else { lo + step * (best_i as f64 - 1.0) };
    let b = if best_i == n - 1 { hi } else { lo + step * (best_i as f64 + 1.0) };
    let (x, v) = golden_section_max(&f, a, b, tol);
    if v >= best {
        (x, v)
    } else {
        (lo + step * best_i as f64, best)
    }
}
