//! Recovery decoders and recovery-success metrics.
//!
//! All decoders return exactly `k` items. Ties are broken toward the lowest
//! index everywhere so that decoding is a pure function of `(X, Y, k)`.

use serde::{Deserialize, Serialize};

use crate::bits::{BitMatrix, BitVec};
use crate::comb::binomial;
use crate::design::{DefectiveSet, Outcomes};
use crate::error::{invalid, Error, Result};

/// Largest `C(p, k)` accepted by [`decode_ml_exhaustive`].
pub const ML_GUARD: u128 = 10_000_000;

/// Sorted, duplicate-free decoder output.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Estimate {
    items: Vec<usize>,
}

impl Estimate {
    pub fn new(mut items: Vec<usize>) -> Self {
        items.sort_unstable();
        items.dedup();
        Self { items }
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    pub fn to_mask(&self, p: usize) -> BitVec {
        BitVec::from_indices(p, self.items.iter().copied())
    }
}

fn check_dims(x: &BitMatrix, y: &Outcomes, k: usize) -> Result<()> {
    if x.rows() != y.len() {
        return Err(invalid(format!("design has {} tests but {} outcomes", x.rows(), y.len())));
    }
    if k == 0 || k > x.cols() {
        return Err(invalid(format!("need 1 <= k <= p, got k={k}, p={}", x.cols())));
    }
    Ok(())
}

/// Items that appear in no negative test.
pub fn comp_candidates(x: &BitMatrix, y: &Outcomes) -> BitVec {
    let mut candidates = x.or_of_rows(|i| !y.get(i));
    candidates.negate();
    candidates
}

/// Tops `chosen` up to `k` items with the lowest-index items not yet chosen.
fn pad_lowest(mut chosen: Vec<usize>, k: usize, p: usize) -> Vec<usize> {
    if chosen.len() < k {
        let taken = BitVec::from_indices(p, chosen.iter().copied());
        let mut free = (0..p).filter(|&j| !taken.get(j));
        while chosen.len() < k {
            chosen.push(free.next().expect("k <= p"));
        }
    }
    chosen
}

/// COMP: the `k` lowest-index items not excluded by a negative test, padded
/// with the lowest-index excluded items when fewer than `k` survive.
pub fn decode_comp(x: &BitMatrix, y: &Outcomes, k: usize) -> Result<Estimate> {
    check_dims(x, y, k)?;
    let chosen: Vec<usize> = comp_candidates(x, y).iter_ones().take(k).collect();
    Ok(Estimate::new(pad_lowest(chosen, k, x.cols())))
}

/// Number of positive tests containing each item (zero for non-candidates).
fn positive_counts(x: &BitMatrix, y: &Outcomes, candidates: &BitVec) -> Vec<u32> {
    let mut counts = vec![0u32; x.cols()];
    for i in (0..x.rows()).filter(|&i| y.get(i)) {
        for (w, (&row, &cand)) in x.row_words(i).iter().zip(candidates.words()).enumerate() {
            let mut hits = row & cand;
            while hits != 0 {
                counts[w * 64 + hits.trailing_zeros() as usize] += 1;
                hits &= hits - 1;
            }
        }
    }
    counts
}

/// Among COMP candidates, the `k` items contained in the most positive tests
/// (lowest index wins ties); padded like [`decode_comp`].
pub fn decode_rank_overlap(x: &BitMatrix, y: &Outcomes, k: usize) -> Result<Estimate> {
    check_dims(x, y, k)?;
    let candidates = comp_candidates(x, y);
    let counts = positive_counts(x, y, &candidates);
    let mut ranked: Vec<usize> = candidates.iter_ones().collect();
    // stable sort keeps ascending index order among equal counts
    ranked.sort_by_key(|&j| std::cmp::Reverse(counts[j]));
    ranked.truncate(k);
    Ok(Estimate::new(pad_lowest(ranked, k, x.cols())))
}

/// Lexicographically smallest `k`-set whose OR outcomes reproduce `Y`.
///
/// Guarded by `C(p, k) <= ML_GUARD`. Every consistent set lies inside the
/// COMP candidates, so the search runs over those only; the lexicographic
/// order is preserved by the restriction.
pub fn decode_ml_exhaustive(x: &BitMatrix, y: &Outcomes, k: usize) -> Result<Estimate> {
    check_dims(x, y, k)?;
    let size = binomial(x.cols() as u64, k as u64).unwrap_or(u128::MAX);
    if size > ML_GUARD {
        return Err(Error::InstanceTooLarge { what: "C(p,k)", size, guard: ML_GUARD });
    }
    let candidates: Vec<usize> = comp_candidates(x, y).iter_ones().collect();
    match first_covering_subset(x, y, &candidates, k, u64::MAX) {
        Search::Found(set) => Ok(Estimate::new(set)),
        _ => Err(Error::ModelViolation("no k-set is consistent with the outcomes".into())),
    }
}

pub(crate) enum Search {
    Found(Vec<usize>),
    Exhausted,
    OutOfBudget,
}

/// Depth-first search, in lexicographic order over `pool`, for a `k`-subset
/// whose columns cover every positive test. `budget` caps the number of
/// complete subsets examined.
pub(crate) fn first_covering_subset(x: &BitMatrix, y: &Outcomes, pool: &[usize], k: usize, budget: u64) -> Search {
    if pool.len() < k {
        return Search::Exhausted;
    }
    let positives: Vec<usize> = (0..x.rows()).filter(|&i| y.get(i)).collect();
    // columns restricted to positive tests
    let columns: Vec<BitVec> = pool
        .iter()
        .map(|&j| {
            BitVec::from_indices(
                positives.len(),
                positives.iter().enumerate().filter(|(_, &i)| x.get(i, j)).map(|(r, _)| r),
            )
        })
        .collect();
    let target = BitVec::ones(positives.len());

    struct Dfs<'a> {
        columns: &'a [BitVec],
        target: &'a BitVec,
        k: usize,
        examined: u64,
        budget: u64,
        stack: Vec<usize>,
    }

    impl Dfs<'_> {
        fn go(&mut self, start: usize, covered: &BitVec) -> Option<bool> {
            if self.stack.len() == self.k {
                self.examined += 1;
                if covered == self.target {
                    return Some(true);
                }
                if self.examined >= self.budget {
                    return None;
                }
                return Some(false);
            }
            let remaining = self.k - self.stack.len();
            for c in start..=self.columns.len() - remaining {
                let mut next = covered.clone();
                next.or_assign(&self.columns[c]);
                self.stack.push(c);
                match self.go(c + 1, &next) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                self.stack.pop();
            }
            Some(false)
        }
    }

    let mut dfs = Dfs { columns: &columns, target: &target, k, examined: 0, budget, stack: Vec::with_capacity(k) };
    match dfs.go(0, &BitVec::zeros(positives.len())) {
        Some(true) => Search::Found(dfs.stack.iter().map(|&c| pool[c]).collect()),
        Some(false) => Search::Exhausted,
        None => Search::OutOfBudget,
    }
}

/// Whether `candidate` reproduces `Y` under the OR model.
pub fn is_consistent(x: &BitMatrix, y: &Outcomes, candidate: &[usize]) -> bool {
    (0..x.rows()).all(|i| candidate.iter().any(|&j| x.get(i, j)) == y.get(i))
}

/// Overlap and error counts of an estimate against the truth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub k: usize,
    pub estimate_len: usize,
    pub overlap: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub exact: bool,
    pub alpha: f64,
    pub alpha_approx: bool,
    pub delta: f64,
    pub weak: bool,
}

const SLACK: f64 = 1e-9;

impl RecoveryReport {
    /// `max(|Ŝ \ S|, |S \ Ŝ|) <= alpha k`.
    pub fn alpha_approx_at(&self, alpha: f64) -> bool {
        (self.false_positives.max(self.false_negatives) as f64) <= alpha * self.k as f64 + SLACK
    }

    /// `|S ∩ Ŝ| >= delta k`.
    pub fn weak_at(&self, delta: f64) -> bool {
        self.overlap as f64 + SLACK >= delta * self.k as f64
    }

    /// Column names of [`RecoveryReport::csv_fields`], in order.
    pub const CSV_HEADER: [&'static str; 10] = [
        "k",
        "estimate_len",
        "overlap",
        "false_positives",
        "false_negatives",
        "exact",
        "alpha",
        "alpha_approx",
        "delta",
        "weak",
    ];

    /// One CSV row; booleans are written as `0`/`1`.
    pub fn csv_fields(&self) -> [String; 10] {
        let b = |v: bool| if v { "1".to_string() } else { "0".to_string() };
        [
            self.k.to_string(),
            self.estimate_len.to_string(),
            self.overlap.to_string(),
            self.false_positives.to_string(),
            self.false_negatives.to_string(),
            b(self.exact),
            self.alpha.to_string(),
            b(self.alpha_approx),
            self.delta.to_string(),
            b(self.weak),
        ]
    }
}

/// Scores `estimate` against `truth` at approximation level `alpha` and weak-recovery level `delta`.
pub fn score(truth: &DefectiveSet, estimate: &Estimate, alpha: f64, delta: f64) -> RecoveryReport {
    let overlap = estimate.items().iter().filter(|&&j| truth.contains(j)).count();
    let false_positives = estimate.len() - overlap;
    let false_negatives = truth.k() - overlap;
    let mut report = RecoveryReport {
        k: truth.k(),
        estimate_len: estimate.len(),
        overlap,
        false_positives,
        false_negatives,
        exact: false_positives == 0 && false_negatives == 0,
        alpha,
        alpha_approx: false,
        delta,
        weak: false,
    };
    report.alpha_approx = report.alpha_approx_at(alpha);
    report.weak = report.weak_at(delta);
    report
}

/// Predicts an extra test's outcome as positive iff it contains an estimated item.
pub fn predict_extra_test(estimate: &Estimate, x_new: &BitVec) -> bool {
    estimate.items().iter().any(|&j| x_new.get(j))
}
