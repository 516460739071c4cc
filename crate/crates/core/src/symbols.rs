//! Radial symbol models, their derivatives, and checkers for the boundary
//! decay hypotheses that certify boundedness or compactness of the induced
//! coefficient multiplier.
//!
//! All models are real valued; a complex symbol is handled by checking its
//! real and imaginary parts separately.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, MonotoneCubic, QuadratureConfig};
use crate::weights::read_two_column_csv;

const R_CAP: f64 = 1.0 - 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncSide {
    /// Keep the base on `[0, s]`, zero after.
    Lo,
    /// Keep the base on `[s, 1)`, zero before.
    Hi,
}

/// A radial symbol model on `[0, 1)`.
#[derive(Clone, Debug)]
pub enum SymbolSpec {
    /// `a(r) = (1 - r)^delta`.
    PowerDecay { delta: f64 },
    /// `a(r) = 1 / (1 - log(1 - r))`; tends to 0 slower than any power.
    InvLog,
    /// `a(r) = log 2` on `[0, 1/2]`, `-log r` on `(1/2, 1)`; continuous with a
    /// kink at the junction.
    LogCap,
    /// `a(r) = c`.
    Constant { c: f64 },
    /// `base` restricted to one side of `s`, zero on the other.
    Truncated {
        base: Box<SymbolSpec>,
        s: f64,
        side: TruncSide,
    },
    /// Monotone interpolation of `(r, a)` samples, constant beyond the ends.
    Tabulated(TabulatedSymbol),
    /// `Σ c_i a_i(r)`.
    ScaledSum(Vec<(f64, SymbolSpec)>),
}

#[derive(Clone, Debug)]
pub struct TabulatedSymbol {
    pub label: String,
    interp: MonotoneCubic,
}

impl SymbolSpec {
    pub fn power_decay(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParams("power decay needs delta > 0".into()));
        }
        Ok(Self::PowerDecay { delta })
    }

    pub fn constant(c: f64) -> Self {
        Self::Constant { c }
    }

    pub fn truncated(base: SymbolSpec, s: f64, side: TruncSide) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParams(
                "truncation point must lie in (0, 1)".into(),
            ));
        }
        Ok(Self::Truncated {
            base: Box::new(base),
            s,
            side,
        })
    }

    pub fn tabulated(label: &str, rs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if rs.len() != values.len() || rs.len() < 2 {
            return Err(Error::TableFormat {
                path: label.to_string(),
                reason: "need at least two (r, a) samples".into(),
            });
        }
        if rs.windows(2).any(|w| w[1] <= w[0]) || rs[0] < 0.0 || *rs.last().unwrap() >= 1.0 {
            return Err(Error::TableFormat {
                path: label.to_string(),
                reason: "r column must be strictly increasing within [0, 1)".into(),
            });
        }
        let interp = MonotoneCubic::new(rs, values)?;
        Ok(Self::Tabulated(TabulatedSymbol {
            label: label.to_string(),
            interp,
        }))
    }

    pub fn from_table_path(path: &Path) -> Result<Self> {
        let (rs, values) = read_two_column_csv(path, ("r", "a"))?;
        Self::tabulated(&path.display().to_string(), rs, values)
    }

    /// `a(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutOfDomain(format!("radius {r} outside [0, 1)")));
        }
        Ok(self.ev(r))
    }

    pub(crate) fn ev(&self, r: f64) -> f64 {
        match self {
            Self::PowerDecay { delta } => (1.0 - r).powf(*delta),
            Self::InvLog => 1.0 / (1.0 - (1.0 - r).ln()),
            Self::LogCap => {
                if r <= 0.5 {
                    2.0f64.ln()
                } else {
                    -r.ln()
                }
            }
            Self::Constant { c } => *c,
            Self::Truncated { base, s, side } => {
                let inside = match side {
                    TruncSide::Lo => r <= *s,
                    TruncSide::Hi => r >= *s,
                };
                if inside {
                    base.ev(r)
                } else {
                    0.0
                }
            }
            Self::Tabulated(t) => t.interp.eval(r),
            Self::ScaledSum(terms) => terms.iter().map(|(c, a)| c * a.ev(r)).sum(),
        }
    }

    /// `a'(r)`; analytic for the closed-form kinds, the C1 interpolant's own
    /// derivative for tabulated data. Truncations refuse exactly at the jump.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutOfDomain(format!("radius {r} outside [0, 1)")));
        }
        match self {
            Self::PowerDecay { delta } => Ok(-delta * (1.0 - r).powf(delta - 1.0)),
            Self::InvLog => {
                let d = 1.0 - (1.0 - r).ln();
                Ok(-1.0 / ((1.0 - r) * d * d))
            }
            Self::LogCap => Ok(if r <= 0.5 { 0.0 } else { -1.0 / r }),
            Self::Constant { .. } => Ok(0.0),
            Self::Truncated { base, s, side } => {
                if r == *s {
                    return Err(Error::NotDifferentiable { r });
                }
                let inside = match side {
                    TruncSide::Lo => r < *s,
                    TruncSide::Hi => r > *s,
                };
                if inside {
                    base.derivative(r)
                } else {
                    Ok(0.0)
                }
            }
            Self::Tabulated(t) => Ok(t.interp.derivative(r)),
            Self::ScaledSum(terms) => {
                let mut acc = 0.0;
                for (c, a) in terms {
                    acc += c * a.derivative(r)?;
                }
                Ok(acc)
            }
        }
    }

    /// Radii where the model jumps or kinks; integration meshes place panel
    /// boundaries here.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::LogCap => vec![0.5],
            Self::Truncated { base, s, .. } => {
                let mut b = base.breakpoints();
                b.push(*s);
                b
            }
            Self::Tabulated(t) => t.interp.knots().to_vec(),
            Self::ScaledSum(terms) => terms.iter().flat_map(|(_, a)| a.breakpoints()).collect(),
            _ => Vec::new(),
        }
    }

    /// True when the model is nonnegative and non-increasing by construction.
    pub fn is_nonneg_nonincreasing(&self) -> bool {
        match self {
            Self::PowerDecay { .. } | Self::InvLog | Self::LogCap => true,
            Self::Constant { c } => *c >= 0.0,
            Self::Truncated { base, side, .. } => {
                *side == TruncSide::Lo && base.is_nonneg_nonincreasing()
            }
            Self::Tabulated(t) => {
                let k = t.interp.knots();
                let vals: Vec<f64> = k.iter().map(|&x| t.interp.eval(x)).collect();
                vals.windows(2).all(|w| w[1] <= w[0]) && *vals.last().unwrap() >= 0.0
            }
            Self::ScaledSum(terms) => terms
                .iter()
                .all(|(c, a)| *c >= 0.0 && a.is_nonneg_nonincreasing()),
        }
    }

    /// Boundary limit `lim_{r→1} a(r)` when the model has one.
    pub fn limit_at_one(&self) -> Option<f64> {
        match self {
            Self::PowerDecay { .. } | Self::InvLog | Self::LogCap => Some(0.0),
            Self::Constant { c } => Some(*c),
            Self::Truncated { base, side, .. } => match side {
                TruncSide::Lo => Some(0.0),
                TruncSide::Hi => base.limit_at_one(),
            },
            Self::Tabulated(t) => Some(t.interp.eval(1.0)),
            Self::ScaledSum(terms) => {
                let mut acc = 0.0;
                for (c, a) in terms {
                    acc += c * a.limit_at_one()?;
                }
                Some(acc)
            }
        }
    }

    /// A cheap upper bound for `sup |a|`, exact for the closed-form kinds.
    pub fn sup_abs_bound(&self) -> f64 {
        match self {
            Self::PowerDecay { .. } | Self::InvLog => 1.0,
            Self::LogCap => 2.0f64.ln(),
            Self::Constant { c } => c.abs(),
            Self::Truncated { base, .. } => base.sup_abs_bound(),
            Self::Tabulated(t) => {
                let k = t.interp.knots();
                k.iter().map(|&x| t.interp.eval(x).abs()).fold(0.0, f64::max)
            }
            Self::ScaledSum(terms) => terms.iter().map(|(c, a)| c.abs() * a.sup_abs_bound()).sum(),
        }
    }

    /// Verifies `a ∈ L1` numerically; cheap since all kinds are bounded.
    pub fn check_integrable(&self, cfg: &QuadratureConfig) -> Result<f64> {
        numerics::integrate_01_seeded(|r| self.ev(r).abs(), &self.breakpoints(), cfg)
    }

    /// `sup_{delta <= r <= 1} |a(r)| r^n`, the discrete counterpart of the
    /// boundary decay statistics. The scan extends `a` by its boundary limit
    /// when one exists, otherwise caps at `r = 1 - 1e-12`. Internally works in
    /// the log domain so large `n` cannot underflow mid-search.
    pub fn discrete_sup(&self, n: f64, delta: f64) -> f64 {
        let log_stat = |r: f64| {
            let a = self.ev(r).abs();
            if a == 0.0 {
                f64::NEG_INFINITY
            } else {
                a.ln() + n * r.ln()
            }
        };
        let (_, best) = numerics::scan_then_golden_max(log_stat, delta, R_CAP, 512, 1e-12);
        let mut sup = best;
        if let Some(limit) = self.limit_at_one() {
            // r^n -> 1 at the endpoint itself
            let end = limit.abs();
            if end > 0.0 {
                sup = sup.max(end.ln());
            }
        }
        sup.exp()
    }

    pub fn spec_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerDecay { delta } => write!(f, "pow:delta={delta}"),
            Self::InvLog => write!(f, "invlog"),
            Self::LogCap => write!(f, "logcap"),
            Self::Constant { c } => write!(f, "const:c={c}"),
            Self::Truncated { base, s, side } => {
                let side = match side {
                    TruncSide::Lo => "lo",
                    TruncSide::Hi => "hi",
                };
                write!(f, "trunc:{base},s={s},side={side}")
            }
            Self::Tabulated(t) => write!(f, "table:{}", t.label),
            Self::ScaledSum(terms) => {
                write!(f, "sum(")?;
                for (i, (c, a)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{c}*[{a}]")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for SymbolSpec {
    type Err = Error;

    /// Grammar: `pow:delta=<f>`, `invlog`, `logcap`, `const:c=<f>`,
    /// `trunc:<inner>,s=<f>,side=<lo|hi>`, `table:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::SpecParse {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        match s {
            "invlog" => return Ok(Self::InvLog),
            "logcap" => return Ok(Self::LogCap),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("pow:") {
            let delta =
                parse_scalar(rest, "delta").ok_or_else(|| parse_err("expected delta=<f>"))?;
            return Self::power_decay(delta);
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let c = parse_scalar(rest, "c").ok_or_else(|| parse_err("expected c=<f>"))?;
            return Ok(Self::constant(c));
        }
        if let Some(rest) = s.strip_prefix("trunc:") {
            let (head, side_str) = rest
                .rsplit_once(",side=")
                .ok_or_else(|| parse_err("missing side=<lo|hi>"))?;
            let side = match side_str {
                "lo" => TruncSide::Lo,
                "hi" => TruncSide::Hi,
                other => return Err(parse_err(&format!("unknown side `{other}`"))),
            };
            let (inner, s_str) = head
                .rsplit_once(",s=")
                .ok_or_else(|| parse_err("missing s=<f>"))?;
            let cut: f64 = s_str
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| parse_err("bad truncation point"))?;
            let base: SymbolSpec = inner.parse()?;
            return Self::truncated(base, cut, side);
        }
        if let Some(path) = s.strip_prefix("table:") {
            return Self::from_table_path(Path::new(path));
        }
        Err(parse_err(
            "expected pow:delta=<f>, invlog, logcap, const:c=<f>, trunc:<inner>,s=<f>,side=<lo|hi> or table:<path>",
        ))
    }
}

fn parse_scalar(part: &str, key: &str) -> Option<f64> {
    part.strip_prefix(key)?
        .strip_prefix('=')?
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
}

// ---------------------------------------------------------------------------
// Boundary decay hypotheses
// ---------------------------------------------------------------------------

/// The decay/smoothness hypotheses checked along the boundary scan grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// `a'` bounded above or below near 1 (one-sided control).
    DerivativeOneSided,
    /// `|a(r) log(1-r)|` bounded: certifies a bounded multiplier.
    LogDecayBounded,
    /// `|a(r) log(1-r)| -> 0`: certifies a compact multiplier.
    LogDecayVanishing,
    /// `|a'(r)| (1-r) log^2(1-r)` bounded.
    DerivativeLogBounded,
    /// `|a'(r)| (1-r) log^2(1-r) -> 0`.
    DerivativeLogVanishing,
    /// `|a(r)| (1-r)^(-1/2-beta/4)` bounded (exponential weights of type beta).
    ExpPowerDecayBounded,
    /// `|a(r)| (1-r)^(-1/2-beta/4) -> 0`.
    ExpPowerDecayVanishing,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 7] = [
        Hypothesis::DerivativeOneSided,
        Hypothesis::LogDecayBounded,
        Hypothesis::LogDecayVanishing,
        Hypothesis::DerivativeLogBounded,
        Hypothesis::DerivativeLogVanishing,
        Hypothesis::ExpPowerDecayBounded,
        Hypothesis::ExpPowerDecayVanishing,
    ];

    pub fn needs_derivative(self) -> bool {
        matches!(
            self,
            Hypothesis::DerivativeOneSided
                | Hypothesis::DerivativeLogBounded
                | Hypothesis::DerivativeLogVanishing
        )
    }

    pub fn needs_weight_beta(self) -> bool {
        matches!(
            self,
            Hypothesis::ExpPowerDecayBounded | Hypothesis::ExpPowerDecayVanishing
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::DerivativeOneSided => "derivative_one_sided",
            Hypothesis::LogDecayBounded => "log_decay_bounded",
            Hypothesis::LogDecayVanishing => "log_decay_vanishing",
            Hypothesis::DerivativeLogBounded => "derivative_log_bounded",
            Hypothesis::DerivativeLogVanishing => "derivative_log_vanishing",
            Hypothesis::ExpPowerDecayBounded => "exp_power_decay_bounded",
            Hypothesis::ExpPowerDecayVanishing => "exp_power_decay_vanishing",
        }
    }
}

impl FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Hypothesis::ALL
            .iter()
            .copied()
            .find(|h| h.name() == s)
            .ok_or_else(|| Error::SpecParse {
                spec: s.to_string(),
                reason: "unknown hypothesis id".into(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypVerdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Result of scanning one hypothesis statistic along `r = 1 - 10^-m`,
/// `m = 1..12` (the representable limit of the geometric grid).
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub hypothesis: Hypothesis,
    /// Largest statistic value over the scan.
    pub scan_sup: f64,
    pub verdict: HypVerdict,
    /// Closest scanned radius to 1.
    pub r_scan_max: f64,
    /// `(r, statistic)` trace for external judgment.
    pub trace: Vec<(f64, f64)>,
}

enum Claim {
    Bounded,
    Vanishing,
    OneSided,
}

/// Evaluates the hypothesis statistic on the geometric boundary grid and
/// classifies the trend.
///
/// Verdicts are conservative: a claim only `Holds` or `Fails` when the last
/// four grid points move monotonically in the claimed direction (or, for
/// boundedness, the increments decay, indicating convergence); anything else
/// is `Inconclusive`, since a limsup cannot be certified from finitely many
/// samples.
pub fn check_hypothesis(
    a: &SymbolSpec,
    h: Hypothesis,
    weight_beta: Option<f64>,
) -> Result<HypothesisReport> {
    if h.needs_weight_beta() && weight_beta.is_none() {
        return Err(Error::InvalidParams(format!(
            "hypothesis {} needs the exponential weight parameter beta",
            h.name()
        )));
    }
    let mut trace = Vec::with_capacity(12);
    for m in 1..=12 {
        let eps = 10f64.powi(-m);
        let r = 1.0 - eps;
        let log_eps = -(m as f64) * 10f64.ln();
        let stat = match h {
            Hypothesis::LogDecayBounded | Hypothesis::LogDecayVanishing => {
                (a.eval(r)? * log_eps).abs()
            }
            Hypothesis::DerivativeOneSided => a.derivative(r)?,
            Hypothesis::DerivativeLogBounded | Hypothesis::DerivativeLogVanishing => {
                a.derivative(r)?.abs() * eps * log_eps * log_eps
            }
            Hypothesis::ExpPowerDecayBounded | Hypothesis::ExpPowerDecayVanishing => {
                let beta = weight_beta.unwrap();
                let av = a.eval(r)?.abs();
                if av == 0.0 {
                    0.0
                } else {
                    (av.ln() - (0.5 + beta / 4.0) * log_eps).exp()
                }
            }
        };
        trace.push((r, stat));
    }
    let claim = match h {
        Hypothesis::LogDecayBounded
        | Hypothesis::DerivativeLogBounded
        | Hypothesis::ExpPowerDecayBounded => Claim::Bounded,
        Hypothesis::LogDecayVanishing
        | Hypothesis::DerivativeLogVanishing
        | Hypothesis::ExpPowerDecayVanishing => Claim::Vanishing,
        Hypothesis::DerivativeOneSided => Claim::OneSided,
    };
    let stats: Vec<f64> = trace.iter().map(|&(_, s)| s).collect();
    let verdict = classify_trend(&stats, claim);
    let scan_sup = stats.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(HypothesisReport {
        hypothesis: h,
        scan_sup,
        verdict,
        r_scan_max: trace.last().unwrap().0,
        trace,
    })
}

fn classify_trend(stats: &[f64], claim: Claim) -> HypVerdict {
    let n = stats.len();
    let tail = &stats[n - 4..];
    let scale = stats.iter().fold(0.0f64, |m, s| m.max(s.abs())).max(1e-300);
    let slack = 1e-9 * scale;
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0] + slack);
    let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0] - slack);
    let strictly_decreasing = tail.windows(2).all(|w| w[1] < w[0] - slack);
    match claim {
        Claim::Bounded => {
            if scale <= 1e-300 {
                return HypVerdict::Holds;
            }
            if nonincreasing {
                return HypVerdict::Holds;
            }
            let d: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
            let increments_decay = d.windows(2).all(|w| w[1] < w[0] - slack);
            if d.iter().all(|&x| x > 0.0) && increments_decay {
                return HypVerdict::Holds;
            }
            let increments_sustained = d.iter().all(|&x| x > 0.0)
                && d.windows(2).all(|w| w[1] >= w[0] - slack)
                && tail[3] - tail[0] > 0.05 * scale;
            if increments_sustained {
                return HypVerdict::Fails;
            }
            HypVerdict::Inconclusive
        }
        Claim::Vanishing => {
            if scale <= 1e-300 {
                return HypVerdict::Holds;
            }
            if strictly_decreasing && tail[3] <= 0.5 * scale {
                return HypVerdict::Holds;
            }
            if nondecreasing && tail[3] > slack {
                return HypVerdict::Fails;
            }
            HypVerdict::Inconclusive
        }
        Claim::OneSided => {
            // Bounded above (possibly diving to -inf) or bounded below
            // (possibly climbing to +inf) both satisfy the one-sided claim.
            if nonincreasing || nondecreasing {
                return HypVerdict::Holds;
            }
            let tail_amp = tail.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            let head_amp = stats[..n - 4].iter().fold(0.0f64, |m, s| m.max(s.abs()));
            if tail_amp <= head_amp * 1.05 {
                HypVerdict::Holds
            } else {
                HypVerdict::Inconclusive
            }
        }
    }
}
