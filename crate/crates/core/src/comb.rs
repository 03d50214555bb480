//! Log-space combinatorics.

/// `ln C(n, k)`, or `-inf` when `k > n`.
///
/// Summed as `Σ ln((n - i) / (k - i))` over the smaller of `k` and `n - k`, which
/// avoids the cancellation of three large log-gamma values.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (k - i) as f64).ln()).sum()
}

pub fn log2_binomial(n: u64, k: u64) -> f64 {
    ln_binomial(n, k) / std::f64::consts::LN_2
}

/// Exact `C(n, k)` when it fits in a `u128`.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln Σ exp(x_i)`; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
}

/// `ln(e^a - 1)` for `a > 0`, stable at both ends.
pub fn ln_expm1(a: f64) -> f64 {
    debug_assert!(a > 0.0);
    if a > 1.0 {
        a + (-(-a).exp()).ln_1p()
    } else {
        a.exp_m1().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials_exact() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(16, 2), Some(120));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(60, 30), Some(118_264_581_564_861_424));
        assert!(binomial(400, 200).is_none());
    }

    #[test]
    fn ln_binomial_matches_exact() {
        for n in 0..60u64 {
            for k in 0..=n {
                let exact = binomial(n, k).unwrap() as f64;
                let got = ln_binomial(n, k);
                assert!((got - exact.ln()).abs() <= 1e-12 * exact.ln().abs().max(1.0), "{n} {k}");
            }
        }
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_binomial_symmetry_large() {
        let a = ln_binomial(1_000_000, 10);
        let b = ln_binomial(1_000_000, 999_990);
        assert!((a - b).abs() < 1e-9);
        // log C(10^6, 10) = Σ ln((10^6 - i)/(10 - i))
        let direct: f64 = (0..10).map(|i| ((1_000_000 - i) as f64).ln() - ((10 - i) as f64).ln()).sum();
        assert!((a - direct).abs() < 1e-10);
    }

    #[test]
    fn lse_and_expm1() {
        let x = log_sum_exp([0.0f64.ln(), 1.0f64.ln(), 2.0f64.ln()]);
        assert!((x - 3.0f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        for &a in &[1e-12f64, 1e-3, 0.5, 1.0, 3.0, 50.0, 800.0] {
            let direct = if a < 700.0 { a.exp_m1().ln() } else { a };
            assert!((ln_expm1(a) - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{a}");
        }
    }
}
