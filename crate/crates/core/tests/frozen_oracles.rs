//! Reference values computed independently (50-digit arbitrary precision,
//! SciPy, and a direct enumeration over all designs and outcomes for the
//! Bayes errors).

use gtaon::detect::{chi2_exact, chi2_lemma3_bound, chi2_lower_terms, lemma3_log1p_bound};
use gtaon::enumerate::JointEnumeration;
use gtaon::stats::binomial_upper_tail;
use gtaon::{bayes_error_oracle, solve_nu};

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(1e-300)
}

#[test]
fn chi2_high_precision_values() {
    let cases = [
        (16, 2, 3, 0.484_966_329_107_444_36, 0.395_392_097_995_882_9),
        (100, 5, 20, 10.715_502_051_335_998, 2.460_912_926_469_233_4),
        (1000, 10, 50, 10.812_054_450_226_746, 2.469_120_573_609_177_6),
        (50, 10, 30, 1_779.119_262_350_544_4, 7.484_435_642_362_173),
        (100_000, 289, 1424, 7_554_989_968.412_694, 22.745_474_104_994_878),
    ];
    for (p, k, n, chi2, log1p) in cases {
        let r = chi2_exact(p, k, n).unwrap();
        assert!(close(r.chi2, chi2, 1e-11), "p={p} k={k} n={n}: {} vs {chi2}", r.chi2);
        assert!(close(r.log1p_chi2, log1p, 1e-12), "p={p} k={k} n={n}");
    }
}

#[test]
fn upper_bound_values() {
    let cases = [
        (1000, 100, 0.3, 4.447_077_957_738_698e48, 112.016_331_705_500_32),
        (10_000, 196, 0.5, 1.093_028_812_197_702_7e20, 46.140_654_429_384_51),
        (100_000, 289, 0.7, 685.988_099_024_665_9, 6.532_316_968_964_101),
        (16, 2, 0.5, 2.467_880_002_109_492, 1.243_543_456_851_799_6),
    ];
    for (p, k, eta, bound, log1p) in cases {
        assert!(close(chi2_lemma3_bound(p, k, eta).unwrap(), bound, 1e-12), "p={p}");
        assert!(close(lemma3_log1p_bound(p, k, eta).unwrap(), log1p, 1e-13), "p={p}");
    }
}

#[test]
fn lower_term_values() {
    let cases = [
        (10_000, 22, 112, 0.939_933_254_109_001_2, 1.490_797_281_151_97, 0.952_653_220_533_013_9),
        (100_000, 47, 292, 0.975_733_874_442_221_6, 1.573_661_814_754_578_3, 0.978_142_144_540_147_6),
        (1_000_000, 100, 735, 0.980_294_756_006_669_9, 1.596_554_615_092_068, 0.990_048_848_535_541_6),
    ];
    for (p, k, n, bound, two_term, ratio) in cases {
        let t = chi2_lower_terms(p, k, n, 0.5).unwrap();
        assert!(close(t.bound, bound, 1e-10), "p={p}: {}", t.bound);
        assert!(close(t.two_term, two_term, 1e-10), "p={p}: {}", t.two_term);
        assert!(close(t.ratio, ratio, 1e-12), "p={p}");
    }
}

#[test]
fn nu_values() {
    for (k, nu) in [
        (1, 0.5),
        (2, 0.585_786_437_626_905),
        (3, 0.618_898_422_047_700_8),
        (64, 0.689_407_155_585_569),
        (3163, 0.693_071_237_164_438_4),
    ] {
        assert!(close(solve_nu(k).unwrap().nu, nu, 1e-13), "k={k}");
    }
}

#[test]
fn binomial_tail_values() {
    for (n, q, m, tail) in [
        (1000, 0.3, 320, 0.089_784_329_770_369_24),
        (50_000, 0.05, 2600, 0.021_070_081_571_607_648),
        (20_000, 0.9, 17_950, 0.882_783_742_007_060_8),
        (100, 0.5, 60, 0.028_443_966_820_490_392),
    ] {
        assert!(close(binomial_upper_tail(n, q, m), tail, 1e-9), "n={n} m={m}");
    }
}

#[test]
fn enumeration_values() {
    for (p, k, n, chi2, bayes) in [
        (4, 1, 2, 0.75, 0.341_796_875),
        (5, 2, 2, 0.9, 0.305_127_728_016_440_9),
        (4, 2, 3, 2.385_618_083_164_126_7, 0.196_508_330_266_231_96),
        (6, 2, 3, 1.441_827_799_864_634_7, 0.262_783_286_344_345_45),
    ] {
        let e = JointEnumeration::run(p, k, n).unwrap();
        assert!((e.chi2() - chi2).abs() < 1e-12, "p={p} k={k} n={n}: {}", e.chi2());
        assert!((e.bayes_error() - bayes).abs() < 1e-10, "p={p} k={k} n={n}");
        assert!((bayes_error_oracle(p, k, n).unwrap() - bayes).abs() < 1e-10);
    }
}
