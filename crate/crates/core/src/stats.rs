//! Small statistical helpers: Gaussian tail, exact binomial tails, Wilson intervals.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// `Q(t) = P[N(0,1) >= t]`.
pub fn gaussian_upper_tail(t: f64) -> f64 {
    0.5 * erfc(t / std::f64::consts::SQRT_2)
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).clamp(0.0, phat), (center + half).clamp(phat, 1.0))
}

/// An empirical rate together with its 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Rate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self { successes, trials, rate, ci_low, ci_high }
    }

    /// Whether `target` lies in the Wilson interval at quantile `z`.
    pub fn covers(&self, target: f64, z: f64) -> bool {
        let (lo, hi) = wilson_interval(self.successes, self.trials, z);
        lo <= target && target <= hi
    }
}

/// Exact `P[Z >= m]` for `Z ~ Binomial(n, q)`.
///
/// The pmf is built by the ratio recurrence outward from the mode and
/// normalized by its own total, so no log-gamma evaluations are involved.
pub fn binomial_upper_tail(n: u64, q: f64, m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if m > n {
        return 0.0;
    }
    if q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return 1.0;
    }
    let odds = q / (1.0 - q);
    let mode = (((n + 1) as f64) * q).floor().min(n as f64) as u64;
    let mut total = 1.0;
    let mut tail = if mode >= m { 1.0 } else { 0.0 };
    let mut term = 1.0;
    for i in mode..n {
        term *= (n - i) as f64 / (i + 1) as f64 * odds;
        if term < 1e-300 {
            break;
        }
        total += term;
        if i + 1 >= m {
            tail += term;
        }
    }
    term = 1.0;
    let mut i = mode;
    while i > 0 {
        term *= i as f64 / (n - i + 1) as f64 / odds;
        if term < 1e-300 {
            break;
        }
        total += term;
        if i > m {
            tail += term;
        }
        i -= 1;
    }
    tail / total
}
