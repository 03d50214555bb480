//! Single definite-defective identification.
//!
//! Each block picks a random subset of `floor(p/k)` items and spends `2v`
//! tests on it, `v = ceil(log2(p/k))`. Local index `i` gets the codeword
//! `binary(i) ++ complement(binary(i))` (most significant bit first), so every
//! codeword has weight exactly `v`. A block containing no defective yields no
//! positives, exactly one defective yields exactly `v` positives spelling its
//! index, and two or more yield more than `v`. Only the middle case produces
//! an answer, which is why the decoder never names a non-defective.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::decode::{comp_candidates, first_covering_subset, Search};
use crate::design::{DefectiveSet, Outcomes};
use crate::error::{invalid, Error, Result};

/// One block of `2v` tests over a random item subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaffronBlock {
    /// Chosen items in ascending order; position in this list is the local index.
    pub subset: Vec<usize>,
    pub v: u32,
}

impl SaffronBlock {
    pub fn tests(&self) -> usize {
        2 * self.v as usize
    }

    /// Codeword of local index `i`: bit `t < v` is bit `v-1-t` of `i`, bit `v+t` its complement.
    pub fn codeword(&self, i: usize) -> Vec<bool> {
        let v = self.v as usize;
        let high: Vec<bool> = (0..v).map(|t| (i >> (v - 1 - t)) & 1 == 1).collect();
        high.iter().copied().chain(high.iter().map(|b| !b)).collect()
    }

    /// Whether test `t` of this block contains local index `i`.
    #[inline]
    fn contains(&self, t: usize, i: usize) -> bool {
        let v = self.v as usize;
        let bit = (i >> (v - 1 - t % v)) & 1 == 1;
        if t < v {
            bit
        } else {
            !bit
        }
    }
}

/// The full design: `c` independent blocks over `p` items.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaffronDesign {
    pub p: usize,
    pub k: usize,
    pub blocks: Vec<SaffronBlock>,
}

/// `ceil(log2(p / k))`, computed exactly as the least `v` with `k 2^v >= p`.
pub fn block_bits(p: usize, k: usize) -> u32 {
    let mut v = 0u32;
    while (k as u128) << v < p as u128 {
        v += 1;
    }
    v
}

/// Draws `c` independent blocks.
pub fn build_saffron<R: Rng + ?Sized>(p: usize, k: usize, c: usize, rng: &mut R) -> Result<SaffronDesign> {
    if k == 0 || k > p {
        return Err(invalid(format!("need 1 <= k <= p, got p={p}, k={k}")));
    }
    if c == 0 {
        return Err(invalid("c must be at least 1"));
    }
    if p < 2 * k {
        return Err(Error::DegenerateDesign(format!("p/k = {p}/{k} < 2 leaves no room for a block code")));
    }
    let v = block_bits(p, k);
    let size = p / k;
    let blocks = (0..c)
        .map(|_| {
            let mut subset = index::sample(rng, p, size).into_vec();
            subset.sort_unstable();
            SaffronBlock { subset, v }
        })
        .collect();
    Ok(SaffronDesign { p, k, blocks })
}

impl SaffronDesign {
    /// Total number of tests, `2 c v`.
    pub fn tests(&self) -> usize {
        self.blocks.iter().map(SaffronBlock::tests).sum()
    }

    /// Blocks stacked in order into one `2cv x p` matrix.
    pub fn to_matrix(&self) -> BitMatrix {
        let mut x = BitMatrix::zeros(self.tests(), self.p);
        let mut row = 0;
        for block in &self.blocks {
            for t in 0..block.tests() {
                for (i, &item) in block.subset.iter().enumerate() {
                    if block.contains(t, i) {
                        x.set(row + t, item, true);
                    }
                }
            }
            row += block.tests();
        }
        x
    }

    /// Noiseless outcomes computed block by block, without materializing the matrix.
    pub fn outcomes(&self, s: &DefectiveSet) -> Outcomes {
        let mut y = Vec::with_capacity(self.tests());
        for block in &self.blocks {
            let local: Vec<usize> = s.items().iter().filter_map(|j| block.subset.binary_search(j).ok()).collect();
            for t in 0..block.tests() {
                y.push(local.iter().any(|&i| block.contains(t, i)));
            }
        }
        Outcomes::from_bools(&y)
    }
}

/// Decoder output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdResult {
    /// `None` means "don't know".
    pub identified: Option<usize>,
    /// Positive-test count of each block.
    pub block_outcomes: Vec<usize>,
}

/// Returns the item decoded by the first block with exactly `v` positives.
pub fn decode_saffron(design: &SaffronDesign, y: &Outcomes) -> Result<DdResult> {
    if y.len() != design.tests() {
        return Err(invalid(format!("expected {} outcomes, got {}", design.tests(), y.len())));
    }
    let mut identified = None;
    let mut block_outcomes = Vec::with_capacity(design.blocks.len());
    let mut offset = 0;
    for (b, block) in design.blocks.iter().enumerate() {
        let v = block.v as usize;
        let bits: Vec<bool> = (offset..offset + 2 * v).map(|i| y.get(i)).collect();
        offset += 2 * v;
        let positives = bits.iter().filter(|&&x| x).count();
        block_outcomes.push(positives);
        if positives > 0 && positives < v {
            return Err(Error::ModelViolation(format!("block {b}: {positives} positives, fewer than v = {v}")));
        }
        if positives != v || identified.is_some() {
            continue;
        }
        // exactly v positives: the halves must be complementary
        if (0..v).any(|t| bits[t] == bits[v + t]) {
            return Err(Error::ModelViolation(format!("block {b}: halves are not complementary")));
        }
        let local = bits[..v].iter().fold(0usize, |acc, &bit| (acc << 1) | usize::from(bit));
        let item = *block
            .subset
            .get(local)
            .ok_or_else(|| Error::ModelViolation(format!("block {b}: local index {local} outside subset")))?;
        identified = Some(item);
    }
    Ok(DdResult { identified, block_outcomes })
}

/// Outcome of the disjoint-witness search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// Some `k`-set disjoint from the truth reproduces `Y`.
    Found,
    /// No such set exists (search was exhaustive).
    Absent,
    /// Random search used its budget without finding one.
    Indeterminate,
}

/// Looks for a `k`-set disjoint from `truth` that is consistent with `(X, Y)`.
///
/// Only items outside `truth` that appear in no negative test can belong to
/// such a set. When the number of `k`-subsets of those items is at most
/// `budget` the search is exhaustive; otherwise `budget` uniformly random
/// subsets are tried and a miss is reported as [`Witness::Indeterminate`].
pub fn dd_negative_witness<R: Rng + ?Sized>(
    x: &BitMatrix,
    y: &Outcomes,
    truth: &DefectiveSet,
    budget: u64,
    rng: &mut R,
) -> Result<Witness> {
    if x.rows() != y.len() || truth.p() != x.cols() {
        return Err(invalid("design, outcomes and defective set disagree in shape"));
    }
    let k = truth.k();
    let mut pool = comp_candidates(x, y);
    pool.and_not_assign(&truth.to_mask());
    let pool: Vec<usize> = pool.iter_ones().collect();
    if pool.len() < k {
        return Ok(Witness::Absent);
    }
    let subsets = crate::comb::binomial(pool.len() as u64, k as u64).unwrap_or(u128::MAX);
    if subsets <= budget as u128 {
        return Ok(match first_covering_subset(x, y, &pool, k, u64::MAX) {
            Search::Found(_) => Witness::Found,
            _ => Witness::Absent,
        });
    }
    for _ in 0..budget {
        let pick: Vec<usize> = index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
        if crate::decode::is_consistent(x, y, &pick) {
            return Ok(Witness::Found);
        }
    }
    Ok(Witness::Indeterminate)
}
