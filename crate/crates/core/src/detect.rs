//! Weak detection: telling the group-testing law `P(X, Y)` apart from the
//! independent null `Q(X, Y) = P(X) P(Y)`, plus the divergence calculators
//! that govern when this is possible.

use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::comb::{ln_binomial, ln_expm1, log_sum_exp};
use crate::decode::comp_candidates;
use crate::design::{solve_nu, Outcomes};
use crate::enumerate::JointEnumeration;
use crate::error::{invalid, Error, Result};
use crate::stats::gaussian_upper_tail;

use std::f64::consts::LN_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Outcomes generated by the group-testing model.
    P,
    /// Outcomes independent of the design.
    Q,
}

/// A detector's decision; `decided == P` exactly when `statistic >= threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectVerdict {
    pub decided: Hypothesis,
    pub statistic: f64,
    pub threshold: f64,
}

impl DetectVerdict {
    fn from_threshold(statistic: f64, threshold: f64) -> Self {
        let decided = if statistic >= threshold { Hypothesis::P } else { Hypothesis::Q };
        Self { decided, statistic, threshold }
    }
}

fn check_dims(x: &BitMatrix, y: &Outcomes) -> Result<()> {
    if x.rows() != y.len() {
        return Err(invalid(format!("design has {} tests but {} outcomes", x.rows(), y.len())));
    }
    Ok(())
}

/// Detector for the all-or-none design: decide `P` iff the positive tests are
/// exactly the all-ones rows. The statistic is the number of rows that agree
/// and the threshold is `n`.
pub fn detect_trivial(x: &BitMatrix, y: &Outcomes) -> Result<DetectVerdict> {
    check_dims(x, y)?;
    let mut agree = 0usize;
    for i in 0..x.rows() {
        let full = match x.row_weight(i) {
            0 => false,
            w if w == x.cols() => true,
            w => return Err(Error::InvalidDesign(format!("row {i} has weight {w}, expected 0 or {}", x.cols()))),
        };
        agree += usize::from(full == y.get(i));
    }
    Ok(DetectVerdict::from_threshold(agree as f64, x.rows() as f64))
}

/// Number of columns whose support lies inside the support of `Y`.
pub fn covered_count(x: &BitMatrix, y: &Outcomes) -> Result<usize> {
    check_dims(x, y)?;
    Ok(comp_candidates(x, y).count_ones())
}

/// Covered-column detector for Bernoulli designs.
///
/// With `n0` negative tests, a column independent of `Y` is covered with
/// probability `q0 = (1 - nu/k)^n0`. Decides `P` iff the covered count is at
/// least `p q0 + k/2`.
pub fn detect_covered(x: &BitMatrix, y: &Outcomes, k: usize) -> Result<DetectVerdict> {
    let covered = covered_count(x, y)?;
    let q = solve_nu(k)?.q;
    let q0 = (1.0 - q).powi(y.negatives() as i32);
    let threshold = x.cols() as f64 * q0 + k as f64 / 2.0;
    Ok(DetectVerdict::from_threshold(covered as f64, threshold))
}

fn check_population(p: usize, k: usize) -> Result<()> {
    if k == 0 || k > p {
        return Err(invalid(format!("need 1 <= k <= p, got p={p}, k={k}")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid(format!("eta must lie in (0,1), got {eta}")));
    }
    Ok(())
}

/// χ²(P‖Q) and related quantities for one `(p, k, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub p: usize,
    pub k: usize,
    pub n: usize,
    /// May be `inf` when the divergence overflows; `log1p_chi2` stays finite.
    pub chi2: f64,
    pub log1p_chi2: f64,
    /// `ln χ²`, `-inf` when χ² = 0.
    pub log_chi2: f64,
    pub eta: Option<f64>,
    pub lemma3_bound: Option<f64>,
    pub lemma3_log1p_bound: Option<f64>,
}

impl DivergenceReport {
    /// Attaches the upper bound at level `eta`.
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        let log1p = lemma3_log1p_bound(self.p, self.k, eta)?;
        self.eta = Some(eta);
        self.lemma3_log1p_bound = Some(log1p);
        self.lemma3_bound = Some(log1p.exp_m1());
        Ok(self)
    }
}

/// `ln` of the hypergeometric weights `C(k,l) C(p-k,l) / C(p,k)` for `l = 0..=k`.
fn ln_overlap_weights(p: usize, k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    let mut lw = -ln_binomial(p as u64, k as u64);
    out.push(lw);
    for l in 0..k {
        if l + 1 > p - k {
            out.push(f64::NEG_INFINITY);
            continue;
        }
        lw += ((k - l) as f64 / (l + 1) as f64).ln() + ((p - k - l) as f64 / (l + 1) as f64).ln();
        out.push(lw);
    }
    out
}

/// Exact χ²(P‖Q) for the Bernoulli design:
/// `(1/C(p,k)) Σ_l C(k,l) C(p-k,l) 2^{n(1-l/k)} - 1`.
///
/// Evaluated as `Σ_l w_l (2^{n(1-l/k)} - 1)` with hypergeometric weights
/// `w_l` summing to one, so every term is non-negative and no cancellation
/// against the `-1` occurs.
pub fn chi2_exact(p: usize, k: usize, n: usize) -> Result<DivergenceReport> {
    check_population(p, k)?;
    let mut report = DivergenceReport {
        p,
        k,
        n,
        chi2: 0.0,
        log1p_chi2: 0.0,
        log_chi2: f64::NEG_INFINITY,
        eta: None,
        lemma3_bound: None,
        lemma3_log1p_bound: None,
    };
    if n == 0 {
        return Ok(report);
    }
    let weights = ln_overlap_weights(p, k);
    let exponent = |l: usize| n as f64 * (1.0 - l as f64 / k as f64) * LN_2;
    report.log1p_chi2 = log_sum_exp(weights.iter().enumerate().map(|(l, &lw)| lw + exponent(l)));
    report.log_chi2 = log_sum_exp(weights.iter().enumerate().take(k).map(|(l, &lw)| lw + ln_expm1(exponent(l))));
    report.chi2 = report.log_chi2.exp();
    Ok(report)
}

/// `E_Q[1{S0 consistent} 1{S' consistent}] = 2^{-n(1 + l/k)}` for `|S0 ∩ S'| = k - l`.
pub fn pair_consistency_prob(k: usize, l: usize, n: usize) -> Result<f64> {
    if k == 0 || l > k {
        return Err(invalid(format!("need 0 <= l <= k and k >= 1, got k={k}, l={l}")));
    }
    Ok((-(n as f64) * (1.0 + l as f64 / k as f64)).exp2())
}

/// Exponent of the upper bound: `e^{1-eta} k (k/p)^eta p / (p - k + 1)`.
pub fn lemma3_log1p_bound(p: usize, k: usize, eta: f64) -> Result<f64> {
    check_population(p, k)?;
    check_eta(eta)?;
    let (p, k) = (p as f64, k as f64);
    Ok((1.0 - eta).exp() * k * (k / p).powf(eta) * p / (p - k + 1.0))
}

/// Upper bound on χ² valid when `n <= (1 - eta) log2 C(p,k)`:
/// `exp[e^{1-eta} k (k/p)^eta p/(p-k+1)] - 1`.
pub fn chi2_lemma3_bound(p: usize, k: usize, eta: f64) -> Result<f64> {
    Ok(lemma3_log1p_bound(p, k, eta)?.exp_m1())
}

/// Lower-bound evaluations of χ² that keep only the `l ∈ {k-1, k}` terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerTerms {
    /// `-1 + r [1 + (k^{1+eta} / p^eta) · p/(p-2k+1)]` with `r = C(p-k,k)/C(p,k)`.
    pub bound: f64,
    /// `-1 + r + k C(p-k,k-1)/C(p,k) · C(p,k)^{(1-eta)/k}`.
    pub two_term: f64,
    /// `r = C(p-k,k)/C(p,k)`.
    pub ratio: f64,
}

/// Lower bound on χ² for `n >= (1 - eta) log2 C(p,k)`.
pub fn chi2_lower_terms(p: usize, k: usize, n: usize, eta: f64) -> Result<LowerTerms> {
    check_population(p, k)?;
    check_eta(eta)?;
    if p < 2 * k {
        return Err(Error::Regime(format!("p - 2k + 1 = {} must be positive", p as i64 - 2 * k as i64 + 1)));
    }
    let ln_c = ln_binomial(p as u64, k as u64);
    let needed = (1.0 - eta) * ln_c / LN_2;
    if (n as f64) < needed - 1e-9 {
        return Err(invalid(format!("n = {n} is below (1-eta) log2 C(p,k) = {needed:.3}")));
    }
    let ln_ratio: f64 = (0..k).map(|i| (-(k as f64) / (p - i) as f64).ln_1p()).sum();
    let ratio = ln_ratio.exp();
    let (pf, kf) = (p as f64, k as f64);
    let gap = pf - 2.0 * kf + 1.0;
    let bound = -1.0 + ratio * (1.0 + kf.powf(1.0 + eta) / pf.powf(eta) * (pf / gap));
    // k C(p-k,k-1)/C(p,k) = r k^2/(p-2k+1)
    let two_term = -1.0 + ratio + (ln_ratio + (kf * kf / gap).ln() + (1.0 - eta) / kf * ln_c).exp();
    Ok(LowerTerms { bound, two_term, ratio })
}

/// Gaussian approximation of a binomial tail with its Berry–Esseen radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerryEsseen {
    /// `Q(lambda)`.
    pub gaussian_value: f64,
    /// `6 rho / (sigma^3 sqrt(p))`.
    pub error_radius: f64,
    pub rho: f64,
    pub sigma: f64,
}

/// For `Z ~ Binomial(p, q0)`, `P[(Z - p q0)/(sigma sqrt p) >= lambda]` lies
/// within `error_radius` of `Q(lambda)`, where
/// `rho = (1-q0)^3 q0 + q0^3 (1-q0)` and `sigma = sqrt((1-q0) q0)`.
pub fn berry_esseen_binomial_tail(p: usize, q0: f64, lambda: f64) -> Result<BerryEsseen> {
    if !(q0 > 0.0 && q0 < 1.0) {
        return Err(invalid(format!("q0 must lie in (0,1), got {q0}")));
    }
    if p == 0 {
        return Err(invalid("p must be positive"));
    }
    let rho = (1.0 - q0).powi(3) * q0 + q0.powi(3) * (1.0 - q0);
    let sigma = ((1.0 - q0) * q0).sqrt();
    Ok(BerryEsseen {
        gaussian_value: gaussian_upper_tail(lambda),
        error_radius: 6.0 * rho / (sigma.powi(3) * (p as f64).sqrt()),
        rho,
        sigma,
    })
}

/// Exact Bayes error of the optimal P-vs-Q test under a uniform prior, by enumeration.
pub fn bayes_error_oracle(p: usize, k: usize, n: usize) -> Result<f64> {
    Ok(JointEnumeration::run(p, k, n)?.bayes_error())
}
