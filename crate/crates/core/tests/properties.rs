use gtaon::comb::log2_binomial;
use gtaon::detect::{chi2_lower_terms, covered_count};
use gtaon::harness::{replay_trial, run_sweep, DecoderName, SweepConfig};
use gtaon::*;
use proptest::prelude::*;

fn population() -> impl Strategy<Value = (usize, usize)> {
    (2usize..400).prop_flat_map(|p| (Just(p), 1usize..=p.min(12)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi2_vanishes_without_tests((p, k) in population()) {
        prop_assert_eq!(chi2_exact(p, k, 0).unwrap().chi2, 0.0);
    }

    #[test]
    fn chi2_increases_with_tests((p, k) in population(), n in 1usize..200) {
        prop_assume!(p > k);
        let a = chi2_exact(p, k, n).unwrap();
        let b = chi2_exact(p, k, n + 1).unwrap();
        prop_assert!(b.log1p_chi2 > a.log1p_chi2);
        prop_assert!(a.chi2 > 0.0);
    }

    #[test]
    fn chi2_below_upper_bound(p in 50usize..5000, k in 1usize..20, eta in 0.05f64..0.95) {
        prop_assume!(k < p);
        let n = ((1.0 - eta) * log2_binomial(p as u64, k as u64)).floor() as usize;
        let exact = chi2_exact(p, k, n).unwrap().log1p_chi2;
        prop_assert!(exact <= gtaon::detect::lemma3_log1p_bound(p, k, eta).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn lower_terms_below_exact(p in 100usize..100_000, k in 2usize..40, eta in 0.05f64..0.95) {
        prop_assume!(2 * k < p);
        let n = ((1.0 - eta) * log2_binomial(p as u64, k as u64)).ceil() as usize;
        let t = chi2_lower_terms(p, k, n, eta).unwrap();
        let exact = chi2_exact(p, k, n).unwrap().chi2;
        prop_assert!(t.bound <= t.two_term + 1e-9);
        prop_assert!(t.two_term <= exact * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn planted_instances_respect_the_model((p, k) in population(), n in 0usize..60, seed in any::<u64>()) {
        let params = PopulationParams::new(p, k).unwrap();
        let mut rng = rng_from_seed(seed);
        let s = DefectiveSet::sample(params, &mut rng);
        let x = gen_bernoulli(params, n, &mut rng).unwrap();
        let y = apply_model(&x, &s).unwrap();
        prop_assert!(is_consistent(&x, &y, s.items()));
        let candidates = comp_candidates(&x, &y);
        prop_assert!(s.items().iter().all(|&j| candidates.get(j)));
        prop_assert!(covered_count(&x, &y).unwrap() >= k);
        let comp = decode_comp(&x, &y, k).unwrap();
        prop_assert_eq!(comp.len(), k);
        let report = score(&s, &comp, 0.2, 0.5);
        prop_assert_eq!(report.overlap + report.false_negatives, k);
        prop_assert_eq!(report.exact, comp.items() == s.items());
    }

    #[test]
    fn definite_defective_never_wrong(p in 20usize..2000, k in 1usize..10, c in 1usize..4, seed in any::<u64>()) {
        prop_assume!(p >= 2 * k);
        let params = PopulationParams::new(p, k).unwrap();
        let mut rng = rng_from_seed(seed);
        let s = DefectiveSet::sample(params, &mut rng);
        let design = build_saffron(p, k, c, &mut rng).unwrap();
        prop_assert_eq!(design.tests(), 2 * c * gtaon::dd::block_bits(p, k) as usize);
        let result = decode_saffron(&design, &design.outcomes(&s)).unwrap();
        let v = design.blocks[0].v as usize;
        prop_assert!(result.block_outcomes.iter().all(|&m| m == 0 || m >= v));
        if let Some(item) = result.identified {
            prop_assert!(s.contains(item));
        }
    }

    #[test]
    fn wilson_interval_contains_rate(trials in 1u64..10_000, frac in 0.0f64..=1.0) {
        let successes = (frac * trials as f64).round() as u64;
        let r = Rate::new(successes, trials);
        prop_assert!(r.ci_low <= r.rate && r.rate <= r.ci_high);
        prop_assert!(r.ci_low >= 0.0 && r.ci_high <= 1.0);
    }

    #[test]
    fn trials_replay(seed in any::<u64>(), beta in 0.2f64..2.0, trial in 0u64..50) {
        let mut config = SweepConfig::new(300, 4, vec![beta]);
        config.master_seed = seed;
        config.decoder = DecoderName::RankOverlap;
        prop_assert_eq!(replay_trial(&config, beta, trial).unwrap(), replay_trial(&config, beta, trial).unwrap());
    }
}

#[test]
fn sweep_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = SweepConfig::new(1000, 6, vec![0.4, 0.9, 1.4]);
    config.trials = 40;
    config.master_seed = 77;
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    config.output = Some(dir.path().join("a.csv"));
    let first = run_sweep(&config).unwrap();
    config.output = Some(dir.path().join("b.csv"));
    let second = run_sweep(&config).unwrap();
    assert_eq!(first.curve, second.curve);
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.trials.csv"), read("b.trials.csv"));
    let curve = &first.curve;
    assert!(curve.cells.iter().all(|c| c.exact.ci_low <= c.exact.rate && c.exact.rate <= c.exact.ci_high));
}

#[test]
fn blocks_with_one_defective() {
    use gtaon::harness::{run_dd_experiment, DdConfig};
    let s = run_dd_experiment(&DdConfig { p: 10_000, k: 100, c: 1, trials: 100_000, seed: 12 }).unwrap();
    assert!(s.single_defective_blocks.covers((-1f64).exp(), 5.0), "{:?}", s.single_defective_blocks);
}
