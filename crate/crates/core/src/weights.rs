//! Radial weight models on `[0, 1)` and numerical checkers for the classical
//! regularity conditions (the two-sided maximizer-ratio condition (B),
//! normality, and the shifted-moment condition).
//!
//! A weight is continuous, radial, non-increasing and tends to 0 at the
//! boundary. Everything here is evaluated in the log domain where ratios of
//! nearly vanishing quantities appear.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, MonotoneCubic, QuadratureConfig};

/// Scan cap: the largest radius any checker or line search evaluates.
const R_CAP: f64 = 1.0 - 1e-12;

/// A radial weight model.
#[derive(Clone, Debug)]
pub enum WeightSpec {
    /// `v(r) = (1 - r)^alpha`.
    Standard { alpha: f64 },
    /// `v(r) = exp(-alpha / (1 - r)^beta)`.
    Exponential { alpha: f64, beta: f64 },
    /// `v(r) = 1 / (1 - log(1 - r))`, a weight decaying slower than any power.
    SlowLog,
    /// Monotone interpolation of `(r, v)` samples.
    Tabulated(TabulatedWeight),
}

/// Tabulated weight: monotone piecewise-cubic inside the sample range, linear
/// descent to zero between the last sample and `r = 1`.
#[derive(Clone, Debug)]
pub struct TabulatedWeight {
    pub label: String,
    rs: Vec<f64>,
    vs: Vec<f64>,
    interp: MonotoneCubic,
}

impl TabulatedWeight {
    fn eval(&self, r: f64) -> f64 {
        let last = *self.rs.last().unwrap();
        if r >= last {
            let v_last = *self.vs.last().unwrap();
            v_last * (1.0 - r) / (1.0 - last)
        } else {
            self.interp.eval(r)
        }
    }
}

impl WeightSpec {
    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParams("standard weight needs alpha > 0".into()));
        }
        let w = Self::Standard { alpha };
        w.validate()?;
        Ok(w)
    }

    pub fn exponential(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidParams(
                "exponential weight needs alpha > 0 and beta > 0".into(),
            ));
        }
        let w = Self::Exponential { alpha, beta };
        w.validate()?;
        Ok(w)
    }

    pub fn slow_log() -> Self {
        Self::SlowLog
    }

    /// Builds a tabulated weight from samples; the last sample must sit at
    /// `r >= 1 - 1e-6` because the moments are tail dominated.
    pub fn tabulated(label: &str, rs: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if rs.len() != vs.len() || rs.len() < 2 {
            return Err(Error::TableFormat {
                path: label.to_string(),
                reason: "need at least two (r, v) samples".into(),
            });
        }
        if rs.windows(2).any(|w| w[1] <= w[0]) || rs[0] < 0.0 || *rs.last().unwrap() >= 1.0 {
            return Err(Error::TableFormat {
                path: label.to_string(),
                reason: "r column must be strictly increasing within [0, 1)".into(),
            });
        }
        if *rs.last().unwrap() < 1.0 - 1e-6 {
            return Err(Error::TableFormat {
                path: label.to_string(),
                reason: "last sample must sit at r >= 1 - 1e-6".into(),
            });
        }
        if vs.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::TableFormat {
                path: label.to_string(),
                reason: "v column must be strictly positive".into(),
            });
        }
        if vs.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
            return Err(Error::TableFormat {
                path: label.to_string(),
                reason: "v column must be non-increasing".into(),
            });
        }
        let interp = MonotoneCubic::new(rs.clone(), vs.clone())?;
        let w = Self::Tabulated(TabulatedWeight {
            label: label.to_string(),
            rs,
            vs,
            interp,
        });
        w.validate()?;
        Ok(w)
    }

    /// Loads a `r,v` CSV table.
    pub fn from_table_path(path: &Path) -> Result<Self> {
        let (rs, vs) = read_two_column_csv(path, ("r", "v"))?;
        Self::tabulated(&path.display().to_string(), rs, vs)
    }

    /// Numerical sanity of the weight axioms on a boundary-graded scan grid.
    /// Runs in the log domain since the linear value may underflow long
    /// before the boundary.
    fn validate(&self) -> Result<()> {
        let mut prev = f64::INFINITY;
        for i in 0..=120 {
            let r = 1.0 - 0.79f64.powi(i);
            let lv = self.log_eval(r)?;
            if lv.is_nan() || lv == f64::INFINITY {
                return Err(Error::InvalidParams(format!(
                    "weight must be positive and finite; log value {lv} at r = {r}"
                )));
            }
            if lv > prev + 1e-9 {
                return Err(Error::InvalidParams(format!(
                    "weight must be non-increasing; increases near r = {r}"
                )));
            }
            prev = lv;
        }
        if self.lw(R_CAP) > self.lw(0.0) + 0.5f64.ln() {
            return Err(Error::InvalidParams(
                "weight does not tend to 0 at the boundary".into(),
            ));
        }
        Ok(())
    }

    /// `v(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutOfDomain(format!("radius {r} outside [0, 1)")));
        }
        Ok(self.lw(r).exp())
    }

    /// `ln v(r)`.
    pub fn log_eval(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutOfDomain(format!("radius {r} outside [0, 1)")));
        }
        Ok(self.lw(r))
    }

    /// Internal, domain-checked by callers: `ln v(r)` for `r` in `[0, 1)`.
    pub(crate) fn lw(&self, r: f64) -> f64 {
        match self {
            Self::Standard { alpha } => alpha * (1.0 - r).ln(),
            Self::Exponential { alpha, beta } => -alpha / (1.0 - r).powf(*beta),
            Self::SlowLog => -(1.0 - (1.0 - r).ln()).ln(),
            Self::Tabulated(t) => t.eval(r).ln(),
        }
    }

    /// `ln v(1 - eps)` straight from the boundary offset, so dyadic checks can
    /// go far beyond the radii representable as `1 - eps` in f64.
    pub fn log_eval_offset(&self, eps: f64) -> f64 {
        match self {
            Self::Standard { alpha } => alpha * eps.ln(),
            Self::Exponential { alpha, beta } => -alpha * eps.powf(-beta),
            Self::SlowLog => -(1.0 - eps.ln()).ln(),
            Self::Tabulated(t) => {
                let last = *t.rs.last().unwrap();
                if eps <= 1.0 - last {
                    t.vs.last().unwrap().ln() + (eps / (1.0 - last)).ln()
                } else {
                    t.eval(1.0 - eps).ln()
                }
            }
        }
    }

    /// `I_k = ∫_0^1 r^k v(r) dr`.
    pub fn moment(&self, k: f64, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(self.log_moment(k, cfg)?.exp())
    }

    /// `ln I_k`; immune to underflow of the linear value.
    pub fn log_moment(&self, k: f64, cfg: &QuadratureConfig) -> Result<f64> {
        self.log_moment_from(k, 0.0, cfg)
    }

    /// `ln ∫_lo^1 r^k v(r) dr`.
    pub fn log_moment_from(&self, k: f64, lo: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if !(k >= 0.0) {
            return Err(Error::InvalidParams(format!("moment exponent {k} < 0")));
        }
        let seeds = self.moment_seeds(k)?;
        numerics::integrate_log(|r| k * r.ln() + self.lw(r), lo, &seeds, cfg)
    }

    /// Mesh seeds for the kernel `r^k v(r)`: its maximizer, so graded panels
    /// cannot straddle a sharp interior peak.
    pub(crate) fn moment_seeds(&self, k: f64) -> Result<Vec<f64>> {
        if k >= 1.0 {
            Ok(vec![self.max_point(k)?])
        } else {
            Ok(Vec::new())
        }
    }

    /// The maximizer radius `r_m` of `r^m v(r)` on `[0, 1)`.
    ///
    /// For exponential weights this solves `m = alpha beta (j^(beta+1) - j^beta)`
    /// for the unique `j > 1` and returns `1 - 1/j`; otherwise a golden-section
    /// search on the log objective, refined to 1e-12 in `r`, with ties resolved
    /// toward the smallest maximizer.
    pub fn max_point(&self, m: f64) -> Result<f64> {
        if !(m > 0.0) {
            return Err(Error::InvalidParams(format!("max_point needs m > 0, got {m}")));
        }
        match self {
            Self::Exponential { alpha, beta } => {
                let j = solve_peak_index(*alpha, *beta, m)?;
                Ok(1.0 - 1.0 / j)
            }
            _ => {
                let (r, _) = numerics::golden_section_max(
                    |r| m * r.ln() + self.lw(r),
                    0.0,
                    R_CAP,
                    1e-12,
                );
                Ok(r)
            }
        }
    }

    /// Grammar label, round-trips through [`FromStr`].
    pub fn spec_string(&self) -> String {
        self.to_string()
    }
}

/// Solves `m = alpha beta (j^(beta+1) - j^beta)` for `j > 1` by bracketed
/// bisection; the left side is strictly increasing in `j` on `[1, ∞)`.
pub fn solve_peak_index(alpha: f64, beta: f64, m: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0 && m > 0.0) {
        return Err(Error::InvalidParams(
            "peak index needs positive alpha, beta, m".into(),
        ));
    }
    let psi = |j: f64| alpha * beta * (j.powf(beta + 1.0) - j.powf(beta));
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut guard = 0;
    while psi(hi) < m {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 600 {
            return Err(Error::NonConvergence {
                lo: 0.0,
                panels: guard,
                tail_ratio: f64::NAN,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psi(mid) < m {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Standard { alpha } => write!(f, "standard:alpha={alpha}"),
            Self::Exponential { alpha, beta } => write!(f, "exp:alpha={alpha},beta={beta}"),
            Self::SlowLog => write!(f, "slowlog"),
            Self::Tabulated(t) => write!(f, "table:{}", t.label),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Grammar: `standard:alpha=<f>`, `exp:alpha=<f>,beta=<f>`, `slowlog`,
    /// `table:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::SpecParse {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        if s == "slowlog" {
            return Ok(Self::SlowLog);
        }
        if let Some(rest) = s.strip_prefix("standard:") {
            let alpha = parse_kv(rest, "alpha").ok_or_else(|| parse_err("expected alpha=<f>"))?;
            return Self::standard(alpha);
        }
        if let Some(rest) = s.strip_prefix("exp:") {
            let mut alpha = None;
            let mut beta = None;
            for part in rest.split(',') {
                if let Some(v) = parse_kv(part, "alpha") {
                    alpha = Some(v);
                } else if let Some(v) = parse_kv(part, "beta") {
                    beta = Some(v);
                } else {
                    return Err(parse_err("expected alpha=<f>,beta=<f>"));
                }
            }
            return Self::exponential(
                alpha.ok_or_else(|| parse_err("missing alpha"))?,
                beta.ok_or_else(|| parse_err("missing beta"))?,
            );
        }
        if let Some(path) = s.strip_prefix("table:") {
            return Self::from_table_path(Path::new(path));
        }
        Err(parse_err(
            "expected standard:alpha=<f>, exp:alpha=<f>,beta=<f>, slowlog or table:<path>",
        ))
    }
}

fn parse_kv(part: &str, key: &str) -> Option<f64> {
    part.strip_prefix(key)?
        .strip_prefix('=')?
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
}

/// Reads a two-column CSV with the given header names.
pub(crate) fn read_two_column_csv(path: &Path, header: (&str, &str)) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let display = path.display().to_string();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines.next().ok_or_else(|| Error::TableFormat {
        path: display.clone(),
        reason: "empty file".into(),
    })?;
    let expected = format!("{},{}", header.0, header.1);
    if head.trim() != expected {
        return Err(Error::TableFormat {
            path: display.clone(),
            reason: format!("expected header `{expected}`, found `{}`", head.trim()),
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let err = |what: &str| Error::TableFormat {
            path: display.clone(),
            reason: format!("row {}: {what}", i + 2),
        };
        let x: f64 = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(|| err("bad first column"))?;
        let y: f64 = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(|| err("bad second column"))?;
        if parts.next().is_some() {
            return Err(err("too many columns"));
        }
        xs.push(x);
        ys.push(y);
    }
    Ok((xs, ys))
}

// ---------------------------------------------------------------------------
// Condition reports
// ---------------------------------------------------------------------------

/// Outcome of a finite-scale scan of an asymptotic condition. A finite scan
/// produces evidence, not proof; `Violated` always carries a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub label: String,
    pub value: f64,
}

impl Witness {
    pub(crate) fn new(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            value,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition_name: String,
    /// Human description of the finite parameter range scanned.
    pub scale: String,
    /// Extremal ratios and fitted constants found during the scan.
    pub witness_values: Vec<Witness>,
    pub verdict: Verdict,
}

impl ConditionReport {
    pub fn witness(&self, label: &str) -> Option<f64> {
        self.witness_values
            .iter()
            .find(|w| w.label == label)
            .map(|w| w.value)
    }
}

/// Finite-scale check of the two-sided maximizer-ratio condition (B):
/// whenever `(r_m/r_n)^m v(r_m)/v(r_n) <= b1` with `m, n, |m - n| >= c`,
/// the flipped ratio `(r_n/r_m)^n v(r_n)/v(r_m)` must stay below some `b2`.
///
/// The scan walks all ordered exponent pairs on a log grid at three nested
/// scales. Consistency means: for some cutoff `c` from a small ladder, the
/// recorded maximum of the flipped ratio stabilizes across scales. A finite
/// scan can never refute the quantified statement, so the verdict is either
/// `Consistent` or `Inconclusive`.
pub fn check_condition_b(
    w: &WeightSpec,
    b1: f64,
    max_exponent: f64,
    points_per_decade: usize,
) -> Result<ConditionReport> {
    if !(b1 > 1.0) {
        return Err(Error::InvalidParams("condition (B) needs b1 > 1".into()));
    }
    if !(max_exponent > 10.0) {
        return Err(Error::InvalidParams("max_exponent must exceed 10".into()));
    }
    let c_ladder = [1.0, 2.0, 4.0, 8.0, 16.0];
    let scales = [max_exponent / 100.0, max_exponent / 10.0, max_exponent];
    // log-max of the flipped ratio per (c, scale)
    let mut sup = [[f64::NEG_INFINITY; 3]; 5];
    for (si, &m_top) in scales.iter().enumerate() {
        let m_top = m_top.max(10.0);
        let decades = m_top.log10();
        let count = (decades * points_per_decade as f64).ceil() as usize + 1;
        let grid: Vec<f64> = (0..=count)
            .map(|i| 10f64.powf(decades * i as f64 / count as f64))
            .collect();
        let points: Vec<(f64, f64, f64)> = grid
            .iter()
            .map(|&m| {
                let r = w.max_point(m)?;
                Ok((m, r.ln(), w.lw(r)))
            })
            .collect::<Result<_>>()?;
        for a in &points {
            for b in &points {
                if a.0 == b.0 {
                    continue;
                }
                let (m, ln_rm, lw_m) = *a;
                let (n, ln_rn, lw_n) = *b;
                let premise = m * (ln_rm - ln_rn) + lw_m - lw_n;
                if premise > b1.ln() {
                    continue;
                }
                let flipped = n * (ln_rn - ln_rm) + lw_n - lw_m;
                let gap = (m - n).abs();
                for (ci, &c) in c_ladder.iter().enumerate() {
                    if m >= c && n >= c && gap >= c && flipped > sup[ci][si] {
                        sup[ci][si] = flipped;
                    }
                }
            }
        }
    }
    // A finite limit shows up as decelerating log-growth across the nested
    // scales; sustained or accelerating monotone growth stays inconclusive.
    let stable = |row: &[f64; 3]| {
        if row[2] == f64::NEG_INFINITY {
            return true;
        }
        let d1 = row[1] - row[0];
        let d2 = row[2] - row[1];
        d2 <= (0.5 * d1.max(0.0)).max(1.25f64.ln())
    };
    let mut chosen: Option<(usize, f64)> = None;
    for (ci, row) in sup.iter().enumerate() {
        if stable(row) {
            chosen = Some((ci, row[2]));
            break;
        }
    }
    let mut witnesses = vec![Witness::new("b1", b1)];
    let to_b2 = |lg: f64| {
        if lg == f64::NEG_INFINITY {
            1.0
        } else {
            lg.exp().min(1e300)
        }
    };
    match chosen {
        Some((ci, lg)) => {
            witnesses.push(Witness::new("c", c_ladder[ci]));
            for (si, v) in sup[ci].iter().enumerate() {
                witnesses.push(Witness::new(format!("b2_scale_{si}"), to_b2(*v)));
            }
            witnesses.push(Witness::new("b2", to_b2(lg)));
            Ok(ConditionReport {
                condition_name: "condition_B".into(),
                scale: format!("ordered pairs, exponents in [1, {max_exponent}]"),
                witness_values: witnesses,
                verdict: Verdict::Consistent,
            })
        }
        None => {
            for (si, v) in sup[4].iter().enumerate() {
                witnesses.push(Witness::new(format!("b2_scale_{si}"), to_b2(*v)));
            }
            Ok(ConditionReport {
                condition_name: "condition_B".into(),
                scale: format!("ordered pairs, exponents in [1, {max_exponent}]"),
                witness_values: witnesses,
                verdict: Verdict::Inconclusive,
            })
        }
    }
}

/// Finite-scale normality check on the dyadic ladder `r = 1 - 2^-n`:
/// the one-step ratio `v(1-2^-n)/v(1-2^-n-1)` must look bounded (tail
/// non-increasing), and `inf_k limsup_n v(1-2^-n-k)/v(1-2^-n)` must fall
/// below `1 - 0.05`, with the limsup replaced by the maximum over the tail
/// half of the scanned range.
pub fn check_normal(w: &WeightSpec, n_max: usize, k_max: usize) -> Result<ConditionReport> {
    if n_max < 8 {
        return Err(Error::InvalidParams("check_normal needs n_max >= 8".into()));
    }
    let lam = |n: usize| -> f64 {
        // log of v(1-2^-n)/v(1-2^-(n+1)); >= 0 since v is non-increasing
        w.log_eval_offset(2f64.powi(-(n as i32))) - w.log_eval_offset(2f64.powi(-(n as i32) - 1))
    };
    let lams: Vec<f64> = (1..=n_max).map(lam).collect();
    let tail_start = n_max / 2;
    let mut first_ok = true;
    let mut first_witness = None;
    for i in tail_start..lams.len() - 1 {
        if lams[i + 1] > lams[i] + 1e-9 {
            first_ok = false;
            first_witness = Some((i + 2, lams[i + 1]));
            break;
        }
    }
    let first_sup_log = lams.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut second_inf = f64::INFINITY;
    let mut second_arg = 0usize;
    for k in 1..=k_max {
        let mut limsup = f64::NEG_INFINITY;
        for n in tail_start..=n_max {
            let lr = w.log_eval_offset(2f64.powi(-(n as i32) - k as i32))
                - w.log_eval_offset(2f64.powi(-(n as i32)));
            limsup = limsup.max(lr);
        }
        let v = limsup.exp();
        if v < second_inf {
            second_inf = v;
            second_arg = k;
        }
    }
    let second_ok = second_inf < 1.0 - 0.05;

    let mut witnesses = vec![
        Witness::new("first_dyadic_sup", first_sup_log.exp().min(1e300)),
        Witness::new("first_dyadic_sup_log", first_sup_log),
        Witness::new("second_condition_inf", second_inf),
        Witness::new("second_condition_inf_at_k", second_arg as f64),
    ];
    if let Some((n, l)) = first_witness {
        witnesses.push(Witness::new("first_condition_increasing_at_n", n as f64));
        witnesses.push(Witness::new("first_condition_log_ratio", l));
    }
    if !second_ok {
        witnesses.push(Witness::new("second_condition_violation", second_inf));
    }
    Ok(ConditionReport {
        condition_name: "normality".into(),
        scale: format!("dyadic radii, n <= {n_max}, k <= {k_max}"),
        witness_values: witnesses,
        verdict: if first_ok && second_ok {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
    })
}

/// Finite-scale check of the shifted-moment condition
/// `sup_n I_(n - n^epsilon) / I_n < ∞` on a log-spaced ladder of exponents.
pub fn check_moment_shift(
    w: &WeightSpec,
    epsilon: f64,
    n_max: usize,
    cfg: &QuadratureConfig,
) -> Result<ConditionReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams("epsilon must lie in (0, 1)".into()));
    }
    let mut ladder = vec![1usize];
    while *ladder.last().unwrap() < n_max {
        let next = (*ladder.last().unwrap() * 2).min(n_max);
        ladder.push(next);
    }
    let mut ratios = Vec::with_capacity(ladder.len());
    for &n in &ladder {
        let nf = n as f64;
        let shifted = (nf - nf.powf(epsilon)).max(0.0);
        let lr = w.log_moment(shifted, cfg)? - w.log_moment(nf, cfg)?;
        ratios.push(lr.exp());
    }
    let sup_all = ratios.iter().cloned().fold(0.0, f64::max);
    let head = ratios.len().saturating_sub(3);
    let sup_head = ratios[..head.max(1)].iter().cloned().fold(0.0, f64::max);
    let stabilized = sup_all <= sup_head * 1.05;
    let mut witnesses = vec![
        Witness::new("sup_ratio", sup_all),
        Witness::new("sup_ratio_without_last_points", sup_head),
        Witness::new("epsilon", epsilon),
        Witness::new("last_ratio", *ratios.last().unwrap()),
    ];
    if let Some((i, r)) = ratios.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        witnesses.push(Witness::new("sup_attained_at_n", ladder[i] as f64));
        witnesses.push(Witness::new("sup_attained_value", *r));
    }
    Ok(ConditionReport {
        condition_name: "moment_shift_sup".into(),
        scale: format!("exponents 1..{n_max}, log-spaced ladder"),
        witness_values: witnesses,
        verdict: if stabilized {
            Verdict::Consistent
        } else {
            Verdict::Inconclusive
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn exponential_eval_matches_formula() {
        let w = WeightSpec::exponential(1.0, 1.0).unwrap();
        let v = w.eval(0.5).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn standard_and_slowlog_at_origin() {
        let w = WeightSpec::standard(2.0).unwrap();
        assert!((w.eval(0.0).unwrap() - 1.0).abs() < 1e-15);
        let s = WeightSpec::slow_log();
        assert!((s.eval(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_radius_is_rejected() {
        let w = WeightSpec::standard(1.0).unwrap();
        assert!(matches!(w.eval(1.0), Err(Error::OutOfDomain(_))));
        assert!(matches!(w.eval(-0.1), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn moment_matches_beta_value() {
        let w = WeightSpec::standard(1.0).unwrap();
        let m = w.moment(1.0, &cfg()).unwrap();
        assert!(((m - 1.0 / 6.0) / (1.0 / 6.0)).abs() < 1e-11);
    }

    #[test]
    fn zeroth_moment_dominates_first() {
        for w in [
            WeightSpec::standard(0.5).unwrap(),
            WeightSpec::exponential(1.0, 1.0).unwrap(),
            WeightSpec::slow_log(),
        ] {
            let i0 = w.moment(0.0, &cfg()).unwrap();
            let i1 = w.moment(1.0, &cfg()).unwrap();
            assert!(i0 >= i1, "{w}: I0 = {i0} < I1 = {i1}");
        }
    }

    #[test]
    fn exponential_moment_matches_substitution_oracle() {
        // t = 1/(1-r): ∫_0^1 r^k e^{-1/(1-r)} dr = ∫_1^∞ (1-1/t)^k e^{-t}/t^2 dt.
        let k = 100.0;
        let (a, b) = (1.0f64, 400.0f64);
        let trap = |steps: usize| {
            let h = (b - a) / steps as f64;
            let g = |t: f64| (1.0 - 1.0 / t).powf(k) * (-t).exp() / (t * t);
            let mut s = 0.5 * (g(a) + g(b));
            for i in 1..steps {
                s += g(a + h * i as f64);
            }
            s * h
        };
        let n = 1 << 21;
        let oracle = (4.0 * trap(n) - trap(n / 2)) / 3.0;
        let w = WeightSpec::exponential(1.0, 1.0).unwrap();
        let m = w.moment(k, &cfg()).unwrap();
        assert!(
            ((m - oracle) / oracle).abs() < 1e-8,
            "moment {m} vs oracle {oracle}"
        );
    }

    #[test]
    fn exponential_max_point_solves_closed_equation() {
        let w = WeightSpec::exponential(1.0, 1.0).unwrap();
        // m = j^2 - j with j = 2 gives m = 2 and r = 1 - 1/2.
        let r = w.max_point(2.0).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn standard_max_point_is_parabola_vertex() {
        let w = WeightSpec::standard(1.0).unwrap();
        let r = w.max_point(1.0).unwrap();
        assert!((r - 0.5).abs() < 1e-9);
    }

    #[test]
    fn max_point_is_monotone_and_tends_to_one() {
        for w in [
            WeightSpec::standard(1.0).unwrap(),
            WeightSpec::exponential(2.0, 0.5).unwrap(),
            WeightSpec::slow_log(),
        ] {
            let mut prev = 0.0;
            for m in [1.0, 2.0, 4.0, 16.0, 256.0, 4096.0, 65536.0] {
                let r = w.max_point(m).unwrap();
                assert!(r + 1e-9 >= prev, "{w}: r_m not monotone at m = {m}");
                prev = r;
            }
            assert!(prev > 0.99, "{w}: r_m = {prev} does not approach 1");
        }
    }

    #[test]
    fn condition_b_consistent_for_exponential_and_standard() {
        let e = WeightSpec::exponential(1.0, 1.0).unwrap();
        let r = check_condition_b(&e, 4.0, 1e4, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{r:?}");
        let s = WeightSpec::standard(1.0).unwrap();
        let r = check_condition_b(&s, 4.0, 1e4, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{r:?}");
    }

    #[test]
    fn condition_b_equal_pair_is_trivial() {
        // m = n makes both ratios exactly 1.
        let w = WeightSpec::standard(1.0).unwrap();
        let r = w.max_point(7.0).unwrap();
        let premise = 7.0 * (r.ln() - r.ln()) + w.lw(r) - w.lw(r);
        assert_eq!(premise, 0.0);
    }

    #[test]
    fn normality_verdicts_by_family() {
        let s = check_normal(&WeightSpec::standard(1.0).unwrap(), 256, 8).unwrap();
        assert_eq!(s.verdict, Verdict::Consistent, "{s:?}");
        let h = check_normal(&WeightSpec::standard(0.5).unwrap(), 256, 8).unwrap();
        assert_eq!(h.verdict, Verdict::Consistent);
        let t = check_normal(&WeightSpec::standard(2.0).unwrap(), 256, 8).unwrap();
        assert_eq!(t.verdict, Verdict::Consistent);

        let e = check_normal(&WeightSpec::exponential(1.0, 1.0).unwrap(), 256, 8).unwrap();
        assert_eq!(e.verdict, Verdict::Violated);
        assert!(e.witness("first_condition_increasing_at_n").is_some());

        let sl = check_normal(&WeightSpec::slow_log(), 256, 8).unwrap();
        assert_eq!(sl.verdict, Verdict::Violated);
        assert!(sl.witness("second_condition_violation").is_some());
        assert!(sl.witness("first_condition_increasing_at_n").is_none());
    }

    #[test]
    fn moment_shift_condition_examples() {
        let e = WeightSpec::exponential(1.0, 1.0).unwrap();
        let r = check_moment_shift(&e, 0.5, 4096, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{r:?}");

        let s = WeightSpec::standard(1.0).unwrap();
        let r = check_moment_shift(&s, 0.5, 4096, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent, "{r:?}");

        // One-term ladder: the n = 1 entry is I_0 / I_1, finite.
        let first = (s.log_moment(0.0, &cfg()).unwrap() - s.log_moment(1.0, &cfg()).unwrap()).exp();
        assert!((first - 3.0).abs() < 1e-9); // B(1,2)/B(2,2) = (1/2)/(1/6)
    }

    #[test]
    fn moments_strictly_decrease_in_k() {
        for w in [
            WeightSpec::standard(1.0).unwrap(),
            WeightSpec::exponential(1.0, 1.0).unwrap(),
            WeightSpec::slow_log(),
        ] {
            let mut prev = f64::INFINITY;
            for k in 0..=500 {
                let lm = w.log_moment(k as f64, &cfg()).unwrap();
                assert!(lm < prev, "{w}: I_k not decreasing at k = {k}");
                prev = lm;
            }
        }
    }

    #[test]
    fn doubling_exponent_moment_ratio_stays_bounded_for_normal_weights() {
        // I_k / I_2k bounded for standard weights; empirical max stabilizes.
        let w = WeightSpec::standard(1.0).unwrap();
        let mut ratios = Vec::new();
        let mut k = 1.0;
        while k <= 1e3 {
            let r =
                (w.log_moment(k, &cfg()).unwrap() - w.log_moment(2.0 * k, &cfg()).unwrap()).exp();
            ratios.push(r);
            k *= 2.0;
        }
        let max_all = ratios.iter().cloned().fold(0.0, f64::max);
        let max_head = ratios[..ratios.len() - 2].iter().cloned().fold(0.0, f64::max);
        assert!(max_all <= max_head * 1.05, "ratio still growing: {ratios:?}");
        assert!(max_all < 16.0);
    }

    #[test]
    fn peak_index_scales_like_the_predicted_power() {
        // j(k) ~ k^(1/(beta+1)) with stable constants over k in [10, 1e4].
        for (alpha, beta) in [(1.0, 1.0), (2.0, 0.5)] {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            let mut k = 10.0;
            while k <= 1e4 {
                let j = solve_peak_index(alpha, beta, k).unwrap();
                let c = j / k.powf(1.0 / (beta + 1.0));
                lo = lo.min(c);
                hi = hi.max(c);
                k *= 2.0;
            }
            assert!(hi / lo < 2.0, "({alpha},{beta}): c range [{lo}, {hi}]");
        }
    }

    #[test]
    fn parse_round_trips() {
        for s in ["standard:alpha=1.5", "exp:alpha=1,beta=0.5", "slowlog"] {
            let w: WeightSpec = s.parse().unwrap();
            let round: WeightSpec = w.to_string().parse().unwrap();
            assert_eq!(w.to_string(), round.to_string());
        }
        assert!("standard:alpha=-1".parse::<WeightSpec>().is_err());
        assert!("gauss:alpha=1".parse::<WeightSpec>().is_err());
    }

    #[test]
    fn tabulated_weight_validation() {
        let rs = vec![0.0, 0.5, 0.9, 0.999999];
        let vs = vec![1.0, 0.6, 0.2, 0.01];
        let w = WeightSpec::tabulated("inline", rs, vs).unwrap();
        assert!((w.eval(0.5).unwrap() - 0.6).abs() < 1e-12);
        // beyond the last sample the weight descends linearly to 0
        assert!(w.eval(0.9999999).unwrap() < 0.01);

        let bad = WeightSpec::tabulated("inline", vec![0.0, 0.4, 0.2], vec![1.0, 0.5, 0.2]);
        assert!(bad.is_err());
        let not_tail = WeightSpec::tabulated("inline", vec![0.0, 0.5], vec![1.0, 0.5]);
        assert!(not_tail.is_err());
        let increasing = WeightSpec::tabulated(
            "inline",
            vec![0.0, 0.5, 0.9999995],
            vec![0.5, 1.0, 0.2],
        );
        assert!(increasing.is_err());
    }
}
