//! Block index sequences `m_1 < m_2 < ...` driving the window decomposition.
//!
//! The generic construction chooses each next index so that the smaller of the
//! two maximizer ratios
//! `(r_m/r_m')^m v(r_m)/v(r_m')` and `(r_m'/r_m)^m' v(r_m')/v(r_m)`
//! lands in a narrow band `[b, 1.05 b]` above the construction constant
//! `b > 2`. Closed forms exist for normal weights (geometric indices) and for
//! exponential weights.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weights::WeightSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    GenericInduction,
    ExponentialClosedForm,
    NormalGeometric,
}

/// One block index with its companion maximizer radius (when the builder
/// knows the weight).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockEntry {
    /// Builder-assigned index (formula argument for closed forms, ordinal
    /// otherwise).
    pub n: usize,
    pub m: f64,
    pub r: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSequence {
    /// Construction constant for the generic induction; absent for closed
    /// forms.
    pub b: Option<f64>,
    pub provenance: Provenance,
    pub entries: Vec<BlockEntry>,
}

impl BlockSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.m).collect()
    }

    /// Window positions: 1-based positions `pos` with both neighbours
    /// available, i.e. `2 <= pos <= len - 1`.
    pub fn window_positions(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.len().saturating_sub(1)
    }

    /// The consecutive index triple around 1-based position `pos`.
    pub fn triple(&self, pos: usize) -> Result<(f64, f64, f64)> {
        if pos < 2 || pos + 1 > self.len() {
            return Err(Error::InvalidParams(format!(
                "window position {pos} outside 2..={}",
                self.len().saturating_sub(1)
            )));
        }
        Ok((
            self.entries[pos - 2].m,
            self.entries[pos - 1].m,
            self.entries[pos].m,
        ))
    }

    /// Integer parts of the triple, checking for ramp-degenerate collisions.
    pub fn floor_triple(&self, pos: usize) -> Result<(i64, i64, i64)> {
        let (a, b, c) = self.triple(pos)?;
        let (fa, fb, fc) = (a.floor() as i64, b.floor() as i64, c.floor() as i64);
        if fa == fb || fb == fc {
            return Err(Error::DegenerateBlock {
                pos,
                m_prev: fa,
                m_mid: fb,
                m_next: fc,
            });
        }
        Ok((fa, fb, fc))
    }
}

/// Log of the two defining ratios for candidate index `m` against the current
/// index `mp` (with cached maximizer data), returning the smaller one.
fn log_min_ratio(w: &WeightSpec, mp: f64, ln_rp: f64, lw_p: f64, m: f64) -> Result<f64> {
    let r = w.max_point(m)?;
    let ln_r = r.ln();
    let lw_m = w.lw(r);
    let first = mp * (ln_rp - ln_r) + lw_p - lw_m;
    let second = m * (ln_r - ln_rp) + lw_m - lw_p;
    Ok(first.min(second))
}

/// Generic induction: starting from the smallest `m >= 1` with `r_m >= 1/2`,
/// each step bisects for the next index whose minimum defining ratio lands in
/// `[b, 1.05 b]`. All ratio arithmetic is in the log domain.
pub fn build_blocks_generic(w: &WeightSpec, b: f64, count: usize) -> Result<BlockSequence> {
    if !(b > 2.0) {
        return Err(Error::InvalidB(b));
    }
    if count < 2 {
        return Err(Error::InvalidParams("block sequence needs count >= 2".into()));
    }
    // Seed index: smallest m >= 1 whose maximizer has moved past 1/2;
    // r_m is non-decreasing in m, so bisection applies.
    let m1 = if w.max_point(1.0)? >= 0.5 {
        1.0
    } else {
        let mut lo = 1.0;
        let mut hi = 2.0;
        let mut guard = 0;
        while w.max_point(hi)? < 0.5 {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::NonConvergence {
                    lo,
                    panels: guard,
                    tail_ratio: f64::NAN,
                });
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if w.max_point(mid)? < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let mut entries = vec![BlockEntry {
        n: 1,
        m: m1,
        r: Some(w.max_point(m1)?),
    }];
    let band_lo = b.ln();
    let band_hi = (1.05 * b).ln();
    while entries.len() < count {
        let prev = *entries.last().unwrap();
        let mp = prev.m;
        let rp = prev.r.unwrap();
        let (ln_rp, lw_p) = (rp.ln(), w.lw(rp));
        // bracket: the minimum ratio tends to 1 at m -> mp+ and grows without
        // bound, so expand until it clears the band floor
        let mut lo = mp;
        let mut hi = (mp * 2.0).max(mp + 1.0);
        let mut guard = 0;
        while log_min_ratio(w, mp, ln_rp, lw_p, hi)? < band_lo {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::NonConvergence {
                    lo,
                    panels: guard,
                    tail_ratio: f64::NAN,
                });
            }
        }
        let mut accepted = None;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = log_min_ratio(w, mp, ln_rp, lw_p, mid)?;
            if v < band_lo {
                lo = mid;
            } else if v > band_hi {
                hi = mid;
            } else {
                accepted = Some(mid);
                break;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        let m_next = match accepted {
            Some(m) => m,
            None => {
                // The band was skipped over (ratio discontinuity); take the
                // bracket top if it clears the floor, otherwise give up.
                if log_min_ratio(w, mp, ln_rp, lw_p, hi)? >= band_lo {
                    hi
                } else {
                    return Err(Error::NonConvergence {
                        lo,
                        panels: entries.len(),
                        tail_ratio: f64::NAN,
                    });
                }
            }
        };
        entries.push(BlockEntry {
            n: entries.len() + 1,
            m: m_next,
            r: Some(w.max_point(m_next)?),
        });
    }
    Ok(BlockSequence {
        b: Some(b),
        provenance: Provenance::GenericInduction,
        entries,
    })
}

/// Closed-form indices for exponential weights of type `(alpha, beta)`:
/// `m_n = beta^2 (beta/alpha)^(1/beta) n^(2+2/beta) - beta^2 n^2` with
/// maximizer radius `r = 1 - (alpha/(beta n^2))^(1/beta)`. The formula starts
/// producing usable indices once `m_n >= 1` and `r > 0`; earlier `n` are
/// skipped (for `alpha = beta = 1` the `n = 1` entry degenerates to
/// `m = 0, r = 0`).
pub fn build_blocks_exponential(alpha: f64, beta: f64, count: usize) -> Result<BlockSequence> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParams(
            "exponential closed form needs alpha > 0 and beta > 0".into(),
        ));
    }
    if count < 2 {
        return Err(Error::InvalidParams("block sequence needs count >= 2".into()));
    }
    let coeff = beta * beta * (beta / alpha).powf(1.0 / beta);
    let exponent = 2.0 + 2.0 / beta;
    let index = |n: usize| -> f64 {
        let nf = n as f64;
        coeff * pow_maybe_integer(nf, exponent) - beta * beta * nf * nf
    };
    let radius = |n: usize| -> f64 {
        let nf = n as f64;
        1.0 - (alpha / (beta * nf * nf)).powf(1.0 / beta)
    };
    let mut entries = Vec::with_capacity(count);
    let mut n = 1usize;
    while entries.len() < count {
        let m = index(n);
        if !m.is_finite() {
            return Err(Error::Overflow(format!(
                "closed-form index at n = {n} is not representable"
            )));
        }
        let r = radius(n);
        if m >= 1.0 && r > 0.0 {
            entries.push(BlockEntry { n, m, r: Some(r) });
        }
        n += 1;
        if n > 10_000_000 {
            return Err(Error::InvalidParams(
                "closed form produced no usable indices".into(),
            ));
        }
    }
    Ok(BlockSequence {
        b: None,
        provenance: Provenance::ExponentialClosedForm,
        entries,
    })
}

/// `n^e`, taken through the exact integer-power path when `e` is integral so
/// closed-form indices like `n^4 - n^2` come out exact.
fn pow_maybe_integer(n: f64, e: f64) -> f64 {
    let rounded = e.round();
    if (e - rounded).abs() < 1e-12 && rounded.abs() <= i32::MAX as f64 {
        n.powi(rounded as i32)
    } else {
        n.powf(e)
    }
}

/// Geometric indices `m_n = 2^(k n)` for normal weights. No weight is needed,
/// so maximizer radii are left unset.
pub fn build_blocks_normal(k: f64, count: usize) -> Result<BlockSequence> {
    if !(k > 0.0) {
        return Err(Error::InvalidParams("geometric builder needs k > 0".into()));
    }
    if count < 2 {
        return Err(Error::InvalidParams("block sequence needs count >= 2".into()));
    }
    let mut entries = Vec::with_capacity(count);
    for n in 1..=count {
        let m = (k * n as f64).exp2();
        if !m.is_finite() {
            return Err(Error::Overflow(format!(
                "2^({k} * {n}) exceeds the representable range"
            )));
        }
        entries.push(BlockEntry { n, m, r: None });
    }
    Ok(BlockSequence {
        b: None,
        provenance: Provenance::NormalGeometric,
        entries,
    })
}

/// Growth statistics of a block sequence.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatioStats {
    /// `sup_n (m_(n+1) - m_n) / (m_n - m_(n-1))`, the primary statistic.
    pub step_ratio_sup: f64,
    /// `sup_n m_(n+1) / m_n`.
    pub successor_ratio_sup: f64,
    /// `sup_n (m_(n+1) - m_(n-1)) / m_(n-1)`.
    pub spread_ratio_sup: f64,
}

/// Evaluates the consecutive-difference ratio bound over the sequence.
pub fn verify_ratio_bound(seq: &BlockSequence) -> Result<RatioStats> {
    if seq.len() < 3 {
        return Err(Error::InvalidParams(
            "ratio statistics need at least three indices".into(),
        ));
    }
    let ms = seq.indices();
    let mut step = 0.0f64;
    let mut succ = 0.0f64;
    let mut spread = 0.0f64;
    for w in ms.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        step = step.max((c - b) / (b - a));
        spread = spread.max((c - a) / a);
    }
    for w in ms.windows(2) {
        succ = succ.max(w[1] / w[0]);
    }
    Ok(RatioStats {
        step_ratio_sup: step,
        successor_ratio_sup: succ,
        spread_ratio_sup: spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_closed_form_values() {
        let seq = build_blocks_exponential(1.0, 1.0, 10).unwrap();
        // the n = 1 entry degenerates (m = 0, r = 0) and is skipped
        assert_eq!(seq.entries[0].n, 2);
        assert_eq!(seq.entries[0].m, 12.0);
        assert_eq!(seq.entries[0].r, Some(0.75));
        // for alpha = beta = 1 the coefficient is 1: m_n = n^4 - n^2 exactly
        for e in &seq.entries {
            let nf = e.n as f64;
            assert_eq!(e.m, nf.powi(4) - nf.powi(2), "n = {}", e.n);
        }
    }

    #[test]
    fn normal_geometric_values() {
        let seq = build_blocks_normal(1.0, 5).unwrap();
        let ms = seq.indices();
        assert_eq!(ms, vec![2.0, 4.0, 8.0, 16.0, 32.0]);
        let stats = verify_ratio_bound(&seq).unwrap();
        assert!((stats.step_ratio_sup - 2.0).abs() < 1e-12);
        assert!((stats.successor_ratio_sup - 2.0).abs() < 1e-12);

        assert!(matches!(
            build_blocks_normal(1.0, 2000),
            Err(Error::Overflow(_))
        ));
        assert!(build_blocks_normal(1.0, 1).is_err());
    }

    #[test]
    fn step_ratio_on_degenerate_start_sequence() {
        // hand-built closed-form prefix including the degenerate m = 0 head
        let seq = BlockSequence {
            b: None,
            provenance: Provenance::ExponentialClosedForm,
            entries: vec![
                BlockEntry {
                    n: 1,
                    m: 0.0,
                    r: Some(0.0),
                },
                BlockEntry {
                    n: 2,
                    m: 12.0,
                    r: Some(0.75),
                },
                BlockEntry {
                    n: 3,
                    m: 72.0,
                    r: None,
                },
            ],
        };
        let stats = verify_ratio_bound(&seq).unwrap();
        assert_eq!(stats.step_ratio_sup, 5.0);
    }

    #[test]
    fn generic_builder_lands_in_band() {
        for w in [
            WeightSpec::standard(1.0).unwrap(),
            WeightSpec::exponential(1.0, 1.0).unwrap(),
        ] {
            let b = 4.0;
            let seq = build_blocks_generic(&w, b, 8).unwrap();
            assert_eq!(seq.len(), 8);
            for win in seq.entries.windows(2) {
                let (p, q) = (&win[0], &win[1]);
                let (rp, rq) = (p.r.unwrap(), q.r.unwrap());
                let first = p.m * (rp.ln() - rq.ln()) + w.lw(rp) - w.lw(rq);
                let second = q.m * (rq.ln() - rp.ln()) + w.lw(rq) - w.lw(rp);
                let min = first.min(second).exp();
                assert!(
                    min >= b * (1.0 - 1e-9) && min <= 1.05 * b * (1.0 + 1e-9),
                    "{w}: ratio {min} outside [{b}, {}]",
                    1.05 * b
                );
            }
        }
    }

    #[test]
    fn generic_builder_rejects_small_b() {
        let w = WeightSpec::standard(1.0).unwrap();
        assert!(matches!(
            build_blocks_generic(&w, 2.0, 4),
            Err(Error::InvalidB(_))
        ));
    }

    #[test]
    fn all_builders_are_strictly_monotone() {
        let w = WeightSpec::exponential(1.0, 1.0).unwrap();
        for seq in [
            build_blocks_generic(&w, 4.0, 10).unwrap(),
            build_blocks_exponential(1.0, 1.0, 10).unwrap(),
            build_blocks_normal(0.5, 10).unwrap(),
        ] {
            let ms = seq.indices();
            assert!(ms.windows(2).all(|w| w[1] > w[0]), "{ms:?}");
            let rs: Vec<f64> = seq.entries.iter().filter_map(|e| e.r).collect();
            assert!(rs.windows(2).all(|w| w[1] >= w[0]), "{rs:?}");
        }
    }

    #[test]
    fn generic_growth_exponent_matches_closed_form() {
        // log-log slope of m_n over n = 10..40 should be near 4 for the
        // exponential weight of type (1, 1). The finite window carries a
        // small downward bias from the ordinal offset of the induction
        // (slope -> 4 as the window moves out); b = 6 keeps the offset small.
        let w = WeightSpec::exponential(1.0, 1.0).unwrap();
        let seq = build_blocks_generic(&w, 6.0, 40).unwrap();
        let pts: Vec<(f64, f64)> = seq
            .entries
            .iter()
            .filter(|e| e.n >= 10)
            .map(|e| ((e.n as f64).ln(), e.m.ln()))
            .collect();
        let slope = least_squares_slope(&pts);
        assert!(
            (slope - 4.0).abs() <= 0.3,
            "log-log slope {slope} not within 4 ± 0.3"
        );
    }

    #[test]
    fn generic_stays_in_corridor_of_closed_form() {
        let w = WeightSpec::exponential(1.0, 1.0).unwrap();
        let cf = build_blocks_exponential(1.0, 1.0, 65).unwrap();
        // pick the b whose 10th generic index lands closest to the closed form
        let target = cf.entries[9].m;
        let mut best = (f64::INFINITY, 3.0);
        for b in [2.5, 3.0, 4.0, 5.0, 6.0, 8.0] {
            let gen = build_blocks_generic(&w, b, 12).unwrap();
            let err = (gen.entries[9].m / target).ln().abs();
            if err < best.0 {
                best = (err, b);
            }
        }
        let gen = build_blocks_generic(&w, best.1, 65).unwrap();
        let corridor = |from: usize, to: usize| {
            let ratios: Vec<f64> = (from..to)
                .map(|i| gen.entries[i].m / cf.entries[i].m)
                .collect();
            let hi = ratios.iter().cloned().fold(0.0, f64::max);
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            hi / lo
        };
        let c30 = corridor(9, 30);
        let c60 = corridor(9, 60);
        assert!(c30 < 10.0, "corridor too wide: {c30}");
        assert!(
            c60 <= 2.5 * c30,
            "corridor unstable under range doubling: {c30} -> {c60}"
        );
    }

    #[test]
    fn ratio_statistic_does_not_explode() {
        let w = WeightSpec::exponential(1.0, 1.0).unwrap();
        for seq in [
            build_blocks_generic(&w, 4.0, 24).unwrap(),
            build_blocks_exponential(1.0, 1.0, 24).unwrap(),
            build_blocks_normal(1.0, 24).unwrap(),
        ] {
            let ms = seq.indices();
            let step = |i: usize| (ms[i + 2] - ms[i + 1]) / (ms[i + 1] - ms[i]);
            let all: Vec<f64> = (0..ms.len() - 2).map(step).collect();
            let last_third = &all[all.len() * 2 / 3..];
            let max_all = all.iter().cloned().fold(0.0, f64::max);
            let max_tail = last_third.iter().cloned().fold(0.0, f64::max);
            assert!(max_tail <= max_all * 1.01 + 1e-9, "{:?}", seq.provenance);
        }
    }

    fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}
