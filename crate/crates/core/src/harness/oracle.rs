use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::comb::ln_binomial;
use crate::decode::{comp_candidates, decode_ml_exhaustive, is_consistent};
use crate::design::{apply_model, gen_bernoulli, solve_nu, DefectiveSet, Outcomes, PopulationParams};
use crate::detect::{berry_esseen_binomial_tail, chi2_exact, pair_consistency_prob};
use crate::enumerate::{JointEnumeration, ENUMERATION_GUARD};
use crate::error::Result;
use crate::rng::trial_rng;
use crate::stats::{binomial_upper_tail, Rate};

/// Grid limits and sample sizes for [`run_oracle_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_p: usize,
    pub max_k: usize,
    pub max_n: usize,
    /// Samples per Monte Carlo oracle.
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_p: 6, max_k: 2, max_n: 3, mc_samples: 1_000_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    /// Largest observed discrepancy (in sigmas for Monte Carlo checks).
    pub observed: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub limits: OracleLimits,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &OracleCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &str, observed: f64, tolerance: f64, detail: String) -> OracleCheck {
    OracleCheck { name: name.into(), passed: observed <= tolerance, observed, tolerance, detail }
}

/// Cells `(p, k, n)` within the limits whose enumeration fits the guard.
fn grid(limits: &OracleLimits) -> Vec<(usize, usize, usize)> {
    let mut cells = Vec::new();
    for p in 1..=limits.max_p {
        for k in 1..=limits.max_k.min(p) {
            for n in 0..=limits.max_n {
                if n * p < 128 && (1u128 << (n * p)) <= ENUMERATION_GUARD {
                    cells.push((p, k, n));
                }
            }
        }
    }
    cells
}

fn chi2_enumeration(cells: &[(usize, usize, usize)], enums: &[JointEnumeration]) -> Result<OracleCheck> {
    let mut worst = (0.0f64, String::new());
    for (&(p, k, n), e) in cells.iter().zip(enums) {
        let delta = (chi2_exact(p, k, n)?.chi2 - e.chi2()).abs();
        if delta >= worst.0 {
            worst = (delta, format!("p={p} k={k} n={n}"));
        }
    }
    Ok(check("chi2_enumeration", worst.0, 1e-9, format!("{} cells, worst at {}", cells.len(), worst.1)))
}

fn chi2_without_tests(limits: &OracleLimits) -> Result<OracleCheck> {
    let mut rng = trial_rng(limits.seed, 1, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = rng.random_range(1..=100_000usize);
        let k = rng.random_range(1..=p);
        worst = worst.max(chi2_exact(p, k, 0)?.chi2.abs());
    }
    Ok(check("chi2_zero_tests", worst, 0.0, "100 random (p, k)".into()))
}

/// `chi2 = 4^n / C(p,k) Σ_l C(k,l) C(p-k,l) E[1 1] - 1`.
fn chi2_pair_identity(cells: &[(usize, usize, usize)]) -> Result<OracleCheck> {
    let mut worst = 0.0f64;
    for &(p, k, n) in cells {
        let ln_c = ln_binomial(p as u64, k as u64);
        let mut sum = 0.0;
        for l in 0..=k.min(p - k) {
            let w = (ln_binomial(k as u64, l as u64) + ln_binomial((p - k) as u64, l as u64) - ln_c).exp();
            sum += w * pair_consistency_prob(k, l, n)?;
        }
        let via_pairs = 4f64.powi(n as i32) * sum - 1.0;
        worst = worst.max((via_pairs - chi2_exact(p, k, n)?.chi2).abs());
    }
    Ok(check("chi2_pair_identity", worst, 1e-9, format!("{} cells", cells.len())))
}

/// Monte Carlo of `E_Q[1{S0 consistent} 1{S' consistent}]` at `p=5, k=2, n=2`.
fn pair_consistency_mc(limits: &OracleLimits) -> Result<OracleCheck> {
    let (p, k, n) = (5usize, 2usize, 2usize);
    let q = solve_nu(k)?.q;
    let s0 = [0usize, 1];
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for l in 0..=k {
        let s1: Vec<usize> = (0..k).map(|i| if i < k - l { s0[i] } else { k + i }).collect();
        let mut rng = trial_rng(limits.seed, 2, l as u64);
        let mut hits = 0u64;
        let mut row = vec![false; p];
        for _ in 0..limits.mc_samples {
            let mut both = true;
            for _ in 0..n {
                row.iter_mut().for_each(|b| *b = rng.random_bool(q));
                let y: bool = rng.random();
                let a = s0.iter().any(|&j| row[j]) == y;
                let b = s1.iter().any(|&j| row[j]) == y;
                both &= a && b;
            }
            hits += u64::from(both);
        }
        let expected = pair_consistency_prob(k, l, n)?;
        let rate = Rate::new(hits, limits.mc_samples);
        let sigma = (expected * (1.0 - expected) / limits.mc_samples as f64).sqrt();
        let z = (rate.rate - expected).abs() / sigma;
        worst = worst.max(z);
        detail.push(format!("l={l}: {:.5} vs {expected:.5}", rate.rate));
    }
    Ok(check("pair_consistency_mc", worst, 5.0, detail.join("; ")))
}

fn bayes_bounds(cells: &[(usize, usize, usize)], enums: &[JointEnumeration]) -> OracleCheck {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for (&(p, k, n), e) in cells.iter().zip(enums) {
        let bayes = e.bayes_error();
        let chi2 = e.chi2().max(0.0);
        let lower = (0.5 - 0.5 * chi2.sqrt()).max(0.0);
        let violation = (lower - bayes).max(bayes - 0.5).max(0.0);
        if violation > worst {
            worst = violation;
            at = format!(" worst at p={p} k={k} n={n}");
        }
    }
    check("bayes_error_bounds", worst, 1e-12, format!("{} cells{at}", cells.len()))
}

fn bayes_monotone(cells: &[(usize, usize, usize)], enums: &[JointEnumeration]) -> OracleCheck {
    let mut worst = 0.0f64;
    for (i, (&(p, k, n), e)) in cells.iter().zip(enums).enumerate().skip(1) {
        let (pp, kk, nn) = cells[i - 1];
        if pp == p && kk == k && nn + 1 == n {
            worst = worst.max(e.bayes_error() - enums[i - 1].bayes_error());
        }
    }
    check("bayes_error_monotone", worst, 1e-12, "consecutive n at fixed (p, k)".into())
}

fn berry_esseen(limits: &OracleLimits) -> Result<OracleCheck> {
    let mut rng = trial_rng(limits.seed, 3, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let p = rng.random_range(1_000..=100_000usize);
        let q0 = rng.random_range(0.05..0.95);
        let lambda = rng.random_range(-3.0..3.0);
        let be = berry_esseen_binomial_tail(p, q0, lambda)?;
        let cut = p as f64 * q0 + lambda * be.sigma * (p as f64).sqrt();
        let exact = binomial_upper_tail(p as u64, q0, cut.ceil().max(0.0) as u64);
        worst = worst.max((exact - be.gaussian_value).abs() / be.error_radius);
    }
    Ok(check("berry_esseen_tail", worst, 1.0, "50 random (p, q0, lambda); observed is |gap| / radius".into()))
}

fn naive_model(x: &BitMatrix, s: &DefectiveSet) -> Outcomes {
    let y: Vec<bool> = (0..x.rows()).map(|i| s.items().iter().any(|&j| x.get(i, j))).collect();
    Outcomes::from_bools(&y)
}

/// Model, COMP and ML checks on random small Bernoulli instances.
fn decoder_oracles(limits: &OracleLimits) -> Result<Vec<OracleCheck>> {
    let mut model_mismatch = 0u32;
    let mut comp_misses = 0u32;
    let mut ml_inconsistent = 0u32;
    let instances = 300u64;
    for t in 0..instances {
        let mut rng = trial_rng(limits.seed, 4, t);
        let p = rng.random_range(2..=40usize);
        let k = rng.random_range(1..=p.min(4));
        let n = rng.random_range(0..=3 * k * 6);
        let population = PopulationParams::new(p, k)?;
        let s = DefectiveSet::sample(population, &mut rng);
        let x = gen_bernoulli(population, n, &mut rng)?;
        let y = apply_model(&x, &s)?;
        model_mismatch += u32::from(y != naive_model(&x, &s));
        let comp = comp_candidates(&x, &y);
        comp_misses += u32::from(s.items().iter().any(|&j| !comp.get(j)));
        let ml = decode_ml_exhaustive(&x, &y, k)?;
        ml_inconsistent += u32::from(!is_consistent(&x, &y, ml.items()));
    }
    let detail = format!("{instances} random instances");
    Ok(vec![
        check("apply_model_naive", model_mismatch as f64, 0.0, detail.clone()),
        check("comp_superset", comp_misses as f64, 0.0, detail.clone()),
        check("ml_consistency", ml_inconsistent as f64, 0.0, detail),
    ])
}

/// Runs every brute-force and Monte Carlo oracle and reports each one.
pub fn run_oracle_suite(limits: OracleLimits) -> Result<OracleReport> {
    let cells = grid(&limits);
    let enums = cells.iter().map(|&(p, k, n)| JointEnumeration::run(p, k, n)).collect::<Result<Vec<_>>>()?;
    let mut checks = vec![
        chi2_enumeration(&cells, &enums)?,
        chi2_without_tests(&limits)?,
        chi2_pair_identity(&cells)?,
        pair_consistency_mc(&limits)?,
        bayes_bounds(&cells, &enums),
        bayes_monotone(&cells, &enums),
        berry_esseen(&limits)?,
    ];
    checks.extend(decoder_oracles(&limits)?);
    Ok(OracleReport { limits, checks })
}
