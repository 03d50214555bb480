//! Brute-force enumeration of the joint laws `P(X, Y)` and `Q(X, Y)` for tiny
//! Bernoulli instances.
//!
//! Every design `X ∈ {0,1}^{n×p}` is visited. For each one the number of
//! `k`-sets producing each outcome vector is counted, and the integer
//! statistics needed for `E_Q[(P/Q)^2]` and `½ Σ min(P, Q)` are accumulated
//! per design weight `|X|`. Only the final combination with
//! `q^w (1-q)^{np-w}` touches floating point.

use crate::design::solve_nu;
use crate::error::{invalid, Error, Result};

/// Largest `2^(np)` the enumeration accepts.
pub const ENUMERATION_GUARD: u128 = 1 << 24;

/// Per-weight integer sums over all designs of a given size.
#[derive(Clone, Debug)]
pub struct JointEnumeration {
    pub p: usize,
    pub k: usize,
    pub n: usize,
    /// `C(p, k)`.
    pub sets: u64,
    /// `chi_sums[w] = Σ_{|X| = w} Σ_y count(X, y)^2`.
    pub chi_sums: Vec<u128>,
    /// `overlap_sums[w] = Σ_{|X| = w} Σ_y min(count(X, y) 2^n, C(p, k))`.
    pub overlap_sums: Vec<u128>,
}

fn k_subsets(p: usize, k: usize) -> Vec<u32> {
    (0u32..1 << p).filter(|m| m.count_ones() as usize == k).collect()
}

impl JointEnumeration {
    pub fn run(p: usize, k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > p {
            return Err(invalid(format!("need 1 <= k <= p, got p={p}, k={k}")));
        }
        let bits = n * p;
        if bits >= 128 || (1u128 << bits) > ENUMERATION_GUARD {
            return Err(Error::InstanceTooLarge {
                what: "2^(np)",
                size: if bits >= 128 { u128::MAX } else { 1u128 << bits },
                guard: ENUMERATION_GUARD,
            });
        }
        let subsets = k_subsets(p, k);
        let sets = subsets.len() as u64;
        let row_mask = (1u64 << p) - 1;
        let outcomes = 1usize << n;
        let mut chi_sums = vec![0u128; bits + 1];
        let mut overlap_sums = vec![0u128; bits + 1];
        let mut counts = vec![0u64; outcomes];
        for design in 0u64..(1u64 << bits) {
            counts.fill(0);
            for &s in &subsets {
                let mut y = 0usize;
                for i in 0..n {
                    if (design >> (i * p)) & row_mask & s as u64 != 0 {
                        y |= 1 << i;
                    }
                }
                counts[y] += 1;
            }
            let w = design.count_ones() as usize;
            let mut chi = 0u128;
            let mut overlap = 0u128;
            for &c in &counts {
                chi += (c as u128) * (c as u128);
                overlap += ((c as u128) << n).min(sets as u128);
            }
            chi_sums[w] += chi;
            overlap_sums[w] += overlap;
        }
        Ok(Self { p, k, n, sets, chi_sums, overlap_sums })
    }

    fn weighted(&self, sums: &[u128]) -> f64 {
        let q = solve_nu(self.k).expect("k >= 1").q;
        let bits = self.n * self.p;
        sums.iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(w, &s)| s as f64 * q.powi(w as i32) * (1.0 - q).powi((bits - w) as i32))
            .sum()
    }

    /// `E_Q[(P/Q)^2] - 1 = 2^n / C(p,k)^2 · Σ_X P(X) Σ_y count^2 - 1`.
    pub fn chi2(&self) -> f64 {
        let c = self.sets as f64;
        self.weighted(&self.chi_sums) * 2f64.powi(self.n as i32) / (c * c) - 1.0
    }

    /// Bayes error of the optimal test under a uniform prior: `½ Σ min(P, Q)`.
    pub fn bayes_error(&self) -> f64 {
        let denom = self.sets as f64 * 2f64.powi(self.n as i32);
        0.5 * self.weighted(&self.overlap_sums) / denom
    }
}
