//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! `cargo test --test acceptance -- 4 6` runs only the listed criteria.

use std::f64::consts::E;
use std::time::{Duration, Instant};

use gtaon::comb::log2_binomial;
use gtaon::detect::{chi2_lower_terms, lemma3_log1p_bound};
use gtaon::enumerate::JointEnumeration;
use gtaon::harness::{
    run_dd_experiment, run_detect_experiment, run_sweep, run_witness_experiment, run_yprime_experiment, DdConfig,
    DecoderName, DetectConfig, DetectorName, SweepConfig, WitnessConfig, YPrimeConfig,
};
use gtaon::stats::binomial_upper_tail;
use gtaon::{berry_esseen_binomial_tail, chi2_exact, rng_from_seed, DesignKind};
use rand::Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn chi2_exactness() -> Verdict {
    let mut worst = 0.0f64;
    let mut cells = 0;
    for p in 1..=6 {
        for k in 1..=2.min(p) {
            for n in 0..=3 {
                let brute = JointEnumeration::run(p, k, n).unwrap().chi2();
                worst = worst.max((chi2_exact(p, k, n).unwrap().chi2 - brute).abs());
                cells += 1;
            }
        }
    }
    let mut rng = rng_from_seed(1);
    let zero_ok = (0..100).all(|_| {
        let p = rng.random_range(1..=1_000_000usize);
        let k = rng.random_range(1..=p);
        chi2_exact(p, k, 0).unwrap().chi2 == 0.0
    });
    verdict(
        worst <= 1e-9 && zero_ok,
        format!(
            "max |exact - enumeration| = {worst:.2e} over {cells} cells; chi2(p,k,0)=0 for 100 random (p,k): {zero_ok}"
        ),
    )
}

fn upper_bound() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for eta in [0.3, 0.5, 0.7] {
        for p in [1_000usize, 10_000, 100_000] {
            let k = ((p as f64).log2().ceil() as usize).pow(2);
            let n = ((1.0 - eta) * log2_binomial(p as u64, k as u64)).floor() as usize;
            let exact = chi2_exact(p, k, n).unwrap().log1p_chi2;
            let bound = lemma3_log1p_bound(p, k, eta).unwrap();
            ok &= exact <= bound;
            lines.push(format!("eta={eta} p={p}: ln(1+chi2) {exact:.3} <= {bound:.3}"));
        }
    }
    verdict(ok, lines.join("; "))
}

fn lower_bound_regime() -> Verdict {
    let eta = 0.5;
    let mut ok = true;
    let mut lines = Vec::new();
    for p in [10_000usize, 100_000, 1_000_000] {
        let k = ((p as f64).powf(1.0 / 3.0) - 1e-9).ceil() as usize;
        let n = ((1.0 - eta) * log2_binomial(p as u64, k as u64)).ceil() as usize;
        let terms = chi2_lower_terms(p, k, n, eta).unwrap();
        ok &= terms.bound >= 0.01;
        lines.push(format!("p={p} k={k} n={n}: {:.4}", terms.bound));
    }
    verdict(ok, lines.join("; "))
}

fn trivial_detector() -> Verdict {
    let summary = run_detect_experiment(&DetectConfig {
        p: 64,
        k: 4,
        n: 10,
        detector: DetectorName::Trivial,
        trials_p: 100_000,
        trials_q: 1_000_000,
        seed: 4,
    })
    .unwrap();
    let target = 2f64.powi(-10);
    let q = summary.errors_under_q;
    verdict(
        summary.errors_under_p.successes == 0 && q.covers(target, 5.0),
        format!(
            "errors under P: {}/{}; under Q: {:.6} vs 2^-10 = {target:.6}",
            summary.errors_under_p.successes, summary.errors_under_p.trials, q.rate
        ),
    )
}

fn covered_detector() -> Verdict {
    let p = 100_000usize;
    let run = |k: usize| {
        let n = (0.5 * k as f64 * (p as f64 / k as f64).log2()).floor() as usize;
        let summary = run_detect_experiment(&DetectConfig {
            p,
            k,
            n,
            detector: DetectorName::Covered,
            trials_p: 1000,
            trials_q: 1000,
            seed: 5,
        })
        .unwrap();
        (n, summary.error_rate)
    };
    let dense_k = (p as f64).powf(0.7).ceil() as usize;
    let (dense_n, dense) = run(dense_k);
    let (sparse_n, sparse) = run(8);
    verdict(
        dense <= 0.1 && (0.4..=0.6).contains(&sparse),
        format!("dense k={dense_k} n={dense_n}: error {dense:.4} (<= 0.1); sparse k=8 n={sparse_n}: error {sparse:.4} (in [0.4, 0.6])"),
    )
}

fn definite_defective() -> Verdict {
    let mut ok = true;
    let mut lines = Vec::new();
    for c in 1..=3 {
        let s = run_dd_experiment(&DdConfig { p: 10_000, k: 100, c, trials: 100_000, seed: 6 }).unwrap();
        let target = (1.0 - 1.0 / E).powi(c as i32);
        ok &= s.false_identifications == 0 && s.none.covers(target, 5.0);
        lines.push(format!("c={c}: false ids {}, NONE {:.4} vs {target:.4}", s.false_identifications, s.none_rate));
    }
    verdict(ok, lines.join("; "))
}

fn de_caen() -> Verdict {
    let n = (0.5 * log2_binomial(16, 2)).floor() as usize;
    let s =
        run_witness_experiment(&WitnessConfig { p: 16, k: 2, n, trials: 10_000, budget: 1 << 20, seed: 7 }).unwrap();
    let sigma = (s.found.rate * (1.0 - s.found.rate) / s.found.trials as f64).sqrt();
    verdict(
        s.indeterminate == 0 && s.found.rate >= s.de_caen_bound - 3.0 * sigma,
        format!(
            "n={n}: witness frequency {:.4} vs 1/(1+chi2) = {:.4} (sigma {sigma:.4})",
            s.found.rate, s.de_caen_bound
        ),
    )
}

fn yprime() -> Verdict {
    let tests = 100_000;
    let rows = run_yprime_experiment(&YPrimeConfig {
        p: 4096,
        k: 64,
        deltas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        tests,
        seed: 8,
    })
    .unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for r in &rows {
        let pass =
            if r.delta == 1.0 { r.success.successes == tests as u64 } else { r.success.covers(r.predicted, 5.0) };
        ok &= pass;
        lines.push(format!("delta={}: {:.4} vs {:.4}", r.delta, r.success.rate, r.predicted));
    }
    verdict(ok, lines.join("; "))
}

fn all_or_nothing() -> Verdict {
    let p = 1 << 16;
    let betas: Vec<f64> = (5..=14).map(|b| b as f64 / 10.0).collect();

    let mut weak = SweepConfig::new(p, 8, betas);
    weak.decoder = DecoderName::RankOverlap;
    weak.delta = 0.1;
    weak.master_seed = 9;
    let curve = run_sweep(&weak).unwrap().curve;
    let low = curve.cells.first().unwrap().weak.rate;
    let high = curve.cells.last().unwrap().weak.rate;
    let weak_ok = high - low >= 0.5;

    let mut exact = SweepConfig::new(p, 8, vec![1.3]);
    exact.decoder = DecoderName::Comp;
    exact.master_seed = 9;
    let exact_rate = run_sweep(&exact).unwrap().curve.cells[0].exact.rate;
    let exact_ok = exact_rate >= 0.9;

    let mut zeroed = SweepConfig::new(p, 8, vec![0.55]);
    zeroed.design = DesignKind::ColumnZeroed { alpha_prime: 0.5 };
    zeroed.decoder = DecoderName::RankOverlap;
    zeroed.alpha = 0.6;
    zeroed.master_seed = 9;
    let approx_rate = run_sweep(&zeroed).unwrap().curve.cells[0].alpha_approx.rate;
    let approx_ok = approx_rate >= 0.8;

    verdict(
        weak_ok && exact_ok && approx_ok,
        format!(
            "weak(0.1) {low:.3} at beta=0.5 -> {high:.3} at beta=1.4 [{}]; COMP exact at beta=1.3: {exact_rate:.3} (>= 0.9) [{}]; \
             column-zeroed alpha_approx(0.6) at beta=0.55: {approx_rate:.3} (>= 0.8) [{}]",
            tag(weak_ok),
            tag(exact_ok),
            tag(approx_ok)
        ),
    )
}

fn berry_esseen() -> Verdict {
    let mut rng = rng_from_seed(10);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = rng.random_range(1_000..=100_000usize);
        let q0 = rng.random_range(0.05..0.95);
        let lambda = rng.random_range(-3.0..3.0);
        let be = berry_esseen_binomial_tail(p, q0, lambda).unwrap();
        let cut = p as f64 * q0 + lambda * be.sigma * (p as f64).sqrt();
        let exact = binomial_upper_tail(p as u64, q0, cut.ceil().max(0.0) as u64);
        worst = worst.max((exact - be.gaussian_value).abs() / be.error_radius);
    }
    verdict(worst <= 1.0, format!("max |exact - Q(lambda)| / radius = {worst:.4} over 50 cases"))
}

fn replay() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut config = SweepConfig::new(4096, 8, vec![0.5, 1.0, 1.5]);
    config.trials = 100;
    config.master_seed = 11;
    config.detector = Some(DetectorName::Covered);
    config.decoder = DecoderName::RankOverlap;
    let mut bodies = Vec::new();
    for name in ["first", "second"] {
        config.output = Some(dir.path().join(format!("{name}.csv")));
        run_sweep(&config).unwrap();
        let cells = std::fs::read(dir.path().join(format!("{name}.csv"))).unwrap();
        let trials = std::fs::read(dir.path().join(format!("{name}.trials.csv"))).unwrap();
        bodies.push((cells, trials));
    }
    let same = bodies[0] == bodies[1];
    verdict(
        same,
        format!("cell CSV {} bytes, trial CSV {} bytes, identical: {same}", bodies[0].0.len(), bodies[0].1.len()),
    )
}

fn tag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "miss"
    }
}

type Criterion = (u32, &'static str, Duration, fn() -> Verdict);

fn main() {
    let minutes = |m: u64| Duration::from_secs(60 * m);
    let criteria: [Criterion; 11] = [
        (1, "chi-squared exactness", minutes(2), chi2_exactness),
        (2, "upper bound on chi-squared", minutes(1), upper_bound),
        (3, "lower-bound terms in the k = p^(1/3) regime", minutes(1), lower_bound_regime),
        (4, "trivial detector", minutes(2), trivial_detector),
        (5, "covered-column detector", minutes(10), covered_detector),
        (6, "definite defective", minutes(5), definite_defective),
        (7, "de Caen witness frequency", minutes(2), de_caen),
        (8, "Y' predictor", minutes(2), yprime),
        (9, "all-or-nothing contrast", minutes(20), all_or_nothing),
        (10, "Berry-Esseen tail", minutes(1), berry_esseen),
        (11, "replay determinism", minutes(5), replay),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = v.passed && in_time;
        if !passed {
            failed.push(id);
        }
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.1}s of {}s{})",
            if passed { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
