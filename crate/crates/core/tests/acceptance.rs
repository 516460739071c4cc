//! Acceptance suite: every criterion runs standalone at its stated tolerance
//! and prints one pass line (test failure marks the criterion failed). Run
//! with `cargo test -p toeplitz-hv-core --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use toeplitz_hv_core::blocks;
use toeplitz_hv_core::multiplier;
use toeplitz_hv_core::numerics::QuadratureConfig;
use toeplitz_hv_core::symbols::{SymbolSpec, TruncSide};
use toeplitz_hv_core::verify;
use toeplitz_hv_core::weights::WeightSpec;
use toeplitz_hv_core::window::{self, DiagnoseOptions, Evidence};

use common::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn report(criterion: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("{criterion}: PASS in {elapsed:.2?} (budget {budget:.0?})");
    assert!(
        elapsed < budget,
        "{criterion} exceeded its runtime budget: {elapsed:.2?} >= {budget:.0?}"
    );
}

#[test]
fn criterion_1_quadrature_oracle() {
    let started = Instant::now();
    for alpha in [0.5, 1.0, 2.0] {
        let w = WeightSpec::standard(alpha).unwrap();
        for k in 0..=200u32 {
            let m = w.moment(k as f64, &cfg()).unwrap();
            let oracle = beta(k as f64 + 1.0, alpha + 1.0);
            let rel = ((m - oracle) / oracle).abs();
            assert!(
                rel <= 1e-10,
                "alpha={alpha} k={k}: moment {m} vs B = {oracle} (rel {rel:.3e})"
            );
        }
    }
    report(
        "criterion 1 (moments match the log-gamma oracle)",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_2_multiplier_oracle() {
    let started = Instant::now();
    let triples: [(f64, f64, usize); 20] = [
        (0.5, 0.5, 0),
        (0.5, 0.5, 7),
        (0.5, 1.0, 2),
        (0.5, 2.0, 12),
        (1.0, 0.5, 0),
        (1.0, 0.5, 25),
        (1.0, 1.0, 0),
        (1.0, 1.0, 5),
        (1.0, 1.0, 100),
        (1.0, 2.0, 3),
        (2.0, 0.5, 1),
        (2.0, 1.0, 8),
        (2.0, 2.0, 0),
        (2.0, 2.0, 50),
        (0.5, 2.0, 0),
        (2.0, 0.5, 30),
        (1.0, 2.0, 60),
        (0.5, 1.0, 40),
        (2.0, 1.0, 0),
        (0.5, 0.5, 100),
    ];
    for (alpha, delta, n) in triples {
        let w = WeightSpec::standard(alpha).unwrap();
        let a = SymbolSpec::power_decay(delta).unwrap();
        let g = multiplier::gamma(&w, &a, n, &cfg()).unwrap();
        let e = 2.0 * n as f64 + 2.0;
        let oracle = (lbeta(e, alpha + delta + 1.0) - lbeta(e, alpha + 1.0)).exp();
        let rel = ((g - oracle) / oracle).abs();
        assert!(
            rel <= 1e-9,
            "(alpha,delta,n)=({alpha},{delta},{n}): gamma {g} vs {oracle} (rel {rel:.3e})"
        );
    }
    report(
        "criterion 2 (multiplier entries match the beta-ratio oracle)",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_3_monotonicity_suite() {
    let started = Instant::now();
    let weights = [
        WeightSpec::standard(1.0).unwrap(),
        WeightSpec::exponential(1.0, 1.0).unwrap(),
        WeightSpec::slow_log(),
    ];
    let res =
        verify::check_multiplier_monotonicity(&weights, 42, 50, 200, &cfg()).unwrap();
    assert!(
        res.statistic >= -1e-8,
        "worst monotonicity margin {} below -1e-8: {res:?}",
        res.statistic
    );
    assert!(res.pass);
    report(
        "criterion 3 (randomized multiplier monotonicity margins)",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_4_block_closed_forms() {
    let started = Instant::now();
    // closed form for type (1, 1): exactly n^4 - n^2
    let seq = blocks::build_blocks_exponential(1.0, 1.0, 40).unwrap();
    for e in &seq.entries {
        let nf = e.n as f64;
        assert_eq!(e.m, nf.powi(4) - nf.powi(2), "n = {}", e.n);
    }
    // the consecutive-difference statistic stays tame over n <= 40
    let stats = blocks::verify_ratio_bound(&seq).unwrap();
    assert!(stats.step_ratio_sup.is_finite() && stats.step_ratio_sup < 10.0);
    let ms = seq.indices();
    let steps: Vec<f64> = ms
        .windows(3)
        .map(|w| (w[2] - w[1]) / (w[1] - w[0]))
        .collect();
    let tail_max = steps[steps.len() * 2 / 3..]
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    let all_max = steps.iter().cloned().fold(0.0, f64::max);
    assert!(tail_max <= all_max, "statistic exploding: {steps:?}");

    // generic induction reproduces the quartic growth exponent
    let w = WeightSpec::exponential(1.0, 1.0).unwrap();
    let gen = blocks::build_blocks_generic(&w, 6.0, 40).unwrap();
    let pts: Vec<(f64, f64)> = gen
        .entries
        .iter()
        .filter(|e| e.n >= 10)
        .map(|e| ((e.n as f64).ln(), e.m.ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    assert!(
        (slope - 4.0).abs() <= 0.3,
        "generic log-log slope {slope} outside 4 ± 0.3"
    );
    report(
        "criterion 4 (block closed forms and generic growth)",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_5_tail_dominance_and_shifted_ratio() {
    let started = Instant::now();
    for (alpha, beta) in [(1.0, 1.0), (2.0, 0.5)] {
        let tail = verify::check_tail_dominance(alpha, beta, 100.0, 1e4, &cfg()).unwrap();
        assert!(
            tail.pass && tail.statistic <= 2.0,
            "tail dominance for ({alpha},{beta}): {tail:?}"
        );
        let shifted =
            verify::check_shifted_moment_ratio(alpha, beta, 100.0, 1e4, &cfg()).unwrap();
        assert!(
            shifted.pass && shifted.statistic <= 2.0,
            "shifted ratio for ({alpha},{beta}): {shifted:?}"
        );
    }
    report(
        "criterion 5 (exponential tail dominance and shifted-moment ratio)",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_6_randomized_l1_bounds() {
    let started = Instant::now();
    let proj = verify::check_partial_sum_projection(42, 200, &[8, 32, 128]).unwrap();
    assert!(proj.pass, "projection levels grew monotonically: {proj:?}");
    assert!(proj.statistic.is_finite());
    let modu = verify::check_coefficient_modulation(42, 200, &[8, 32, 128]).unwrap();
    assert!(modu.pass, "modulation levels grew monotonically: {modu:?}");
    assert!(modu.statistic.is_finite());
    report(
        "criterion 6 (randomized partial-sum and modulation bounds)",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_7_criterion_end_to_end() {
    let started = Instant::now();
    let w = WeightSpec::standard(1.0).unwrap();
    // geometric blocks 2, 4, ..., 2^16; windows stay below frequency 1e5
    let seq = blocks::build_blocks_normal(1.0, 16).unwrap();
    let opts = DiagnoseOptions {
        max_frequency: 1e5,
        ..DiagnoseOptions::default()
    };

    // (a) slowly decaying symbol: bounded evidence via the 1.1x rule
    let a = SymbolSpec::InvLog;
    let rep = window::diagnose(&w, &a, &seq, None, &opts).unwrap();
    assert_eq!(
        rep.verdict_bounded,
        Evidence::EvidenceFor,
        "(a) expected bounded evidence: {rep:?}"
    );

    // (b) power decay: compact evidence (last <= 0.25 first, negative slope)
    let a = SymbolSpec::power_decay(0.5).unwrap();
    let rep = window::diagnose(&w, &a, &seq, None, &opts).unwrap();
    assert_eq!(
        rep.verdict_compact,
        Evidence::EvidenceFor,
        "(b) expected compact evidence: {rep:?}"
    );
    assert!(rep.trend_slope <= -0.1);
    let first = rep.records.first().unwrap().l1_norm;
    let last = rep.records.last().unwrap().l1_norm;
    assert!(last <= 0.25 * first);

    // (c) truncated symbol: norms below the geometric envelope and -> 0
    let a = SymbolSpec::truncated(SymbolSpec::constant(1.0), 0.5, TruncSide::Lo).unwrap();
    let rep = window::diagnose(&w, &a, &seq, None, &opts).unwrap();
    let q: f64 = 2.0 / 3.0; // 2s/(1+s) at s = 1/2
    let envelope = |m_prev: f64| m_prev * q.powf(m_prev);
    let c2 = rep.records[0].l1_norm / envelope(rep.records[0].m_prev);
    for rec in &rep.records {
        assert!(
            rec.l1_norm <= 1.05 * c2 * envelope(rec.m_prev),
            "(c) n={}: {} above envelope",
            rec.n,
            rec.l1_norm
        );
    }
    let first = rep.records.first().unwrap().l1_norm;
    let last = rep.records.last().unwrap().l1_norm;
    assert!(
        last <= first * 1e-8,
        "(c) norms do not vanish: first {first}, last {last}"
    );
    assert_eq!(rep.verdict_compact, Evidence::EvidenceFor);

    // (d) unit symbol: the identity multiplier; norms track the closed-form
    // trapezoid oracle within [0.3x, 3x] at every window and show no decay
    let a = SymbolSpec::constant(1.0);
    let rep = window::diagnose(&w, &a, &seq, None, &opts).unwrap();
    for rec in &rep.records {
        let (p, m, q) = (
            rec.m_prev.floor() as i64,
            rec.m_mid.floor() as i64,
            rec.m_next.floor() as i64,
        );
        let dense_points = 10 * rec.grid_points;
        let oracle = trapezoid_l1_closed_form(p, m, q, dense_points);
        let ratio = rec.l1_norm / oracle;
        assert!(
            (0.3..=3.0).contains(&ratio),
            "(d) n={}: norm {} vs oracle {} (ratio {ratio})",
            rec.n,
            rec.l1_norm,
            oracle
        );
    }
    assert_eq!(
        rep.verdict_bounded,
        Evidence::EvidenceFor,
        "(d) expected bounded: {rep:?}"
    );
    assert_eq!(
        rep.verdict_compact,
        Evidence::EvidenceAgainst,
        "(d) expected no decay trend: {rep:?}"
    );

    report(
        "criterion 7 (boundedness/compactness sweep end to end)",
        started,
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_7_oracle_self_check() {
    // the closed-form trapezoid evaluator agrees with direct summation on a
    // small window, validating the oracle used in criterion 7(d)
    let coeffs = {
        let seq = blocks::build_blocks_normal(1.0, 3).unwrap();
        let wc = window::window_coeffs(&seq, 2, |_| Ok(1.0)).unwrap();
        wc.to_trig_coeffs()
    };
    let direct = dense_l1_direct(&coeffs, 20_000);
    let closed = trapezoid_l1_closed_form(2, 4, 8, 20_000);
    assert!(
        ((direct - closed) / direct).abs() < 1e-12,
        "{direct} vs {closed}"
    );
}

#[test]
fn criterion_8_kernel_norm_running_sup() {
    let started = Instant::now();
    let w = WeightSpec::exponential(1.0, 1.0).unwrap();
    let sequences = [
        ("normal", blocks::build_blocks_normal(1.0, 13).unwrap()),
        (
            "exponential",
            blocks::build_blocks_exponential(1.0, 1.0, 13).unwrap(),
        ),
        (
            "generic",
            blocks::build_blocks_generic(&w, 4.0, 13).unwrap(),
        ),
    ];
    for (name, seq) in &sequences {
        let mut sup = 0.0f64;
        let mut sups = Vec::new();
        for pos in 2..=12 {
            sup = sup.max(window::vdp_kernel_m1(seq, pos, 4).unwrap());
            sups.push(sup);
        }
        let k = sups.len();
        let rel = (sups[k - 1] - sups[k - 3]) / sups[k - 3];
        assert!(
            rel < 0.05,
            "{name}: running sup changed {rel:.3} over the last three: {sups:?}"
        );
    }
    report(
        "criterion 8 (kernel-norm running sup stabilizes for all builders)",
        started,
        Duration::from_secs(120),
    );
}
