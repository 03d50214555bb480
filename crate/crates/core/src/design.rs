//! Test designs, the noiseless OR model, and the independent null model.

use std::io::{BufRead, Write};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitMatrix, BitVec};
use crate::error::{invalid, Error, Result};

/// Population size `p` and number of defectives `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationParams {
    pub p: usize,
    pub k: usize,
}

impl PopulationParams {
    pub fn new(p: usize, k: usize) -> Result<Self> {
        if k == 0 || k > p {
            return Err(invalid(format!("need 1 <= k <= p, got p={p}, k={k}")));
        }
        Ok(Self { p, k })
    }

    /// `k * log2(p / k)`, the scale on which test budgets are expressed.
    pub fn tests_scale(&self) -> f64 {
        self.k as f64 * (self.p as f64 / self.k as f64).log2()
    }

    pub fn log2_binomial(&self) -> f64 {
        crate::comb::log2_binomial(self.p as u64, self.k as u64)
    }
}

/// Inclusion intensity `nu` and the per-entry probability `q = nu / k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliParams {
    pub k: usize,
    pub nu: f64,
    pub q: f64,
}

/// Chooses `nu` so that a test containing each of `k` defectives with
/// probability `nu / k` is positive with probability exactly one half:
/// `nu = k (1 - 2^(-1/k))`.
pub fn solve_nu(k: usize) -> Result<BernoulliParams> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    // 1 - 2^(-1/k) = -expm1(-ln2 / k)
    let q = -(-std::f64::consts::LN_2 / k as f64).exp_m1();
    Ok(BernoulliParams { k, nu: k as f64 * q, q })
}

/// The defective set: strictly increasing indices below `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DefectiveSet {
    p: usize,
    items: Vec<usize>,
}

impl DefectiveSet {
    pub fn new(p: usize, items: Vec<usize>) -> Result<Self> {
        if items.is_empty() {
            return Err(invalid("defective set must be non-empty"));
        }
        if items.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("defective indices must be strictly increasing"));
        }
        if let Some(&last) = items.last() {
            if last >= p {
                return Err(invalid(format!("defective index {last} out of range for p={p}")));
            }
        }
        Ok(Self { p, items })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(p: usize, mut items: Vec<usize>) -> Result<Self> {
        items.sort_unstable();
        items.dedup();
        Self::new(p, items)
    }

    /// Uniformly random `k`-subset of `{0, ..., p-1}`.
    pub fn sample<R: Rng + ?Sized>(params: PopulationParams, rng: &mut R) -> Self {
        let mut items = index::sample(rng, params.p, params.k).into_vec();
        items.sort_unstable();
        Self { p: params.p, items }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn contains(&self, item: usize) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    pub fn to_mask(&self) -> BitVec {
        BitVec::from_indices(self.p, self.items.iter().copied())
    }
}

/// Test outcome vector `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Outcomes {
    bits: BitVec,
}

impl Outcomes {
    pub fn from_bits(bits: BitVec) -> Self {
        Self { bits }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self { bits: BitVec::from_bools(bits) }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn positives(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn negatives(&self) -> usize {
        self.bits.count_zeros()
    }

    /// Draws `n` i.i.d. fair bits.
    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut bits = BitVec::zeros(n);
        for i in 0..n {
            if rng.random::<bool>() {
                bits.set(i, true);
            }
        }
        Self { bits }
    }
}

/// Which design to generate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignKind {
    /// i.i.d. entries with probability `nu / k`.
    Bernoulli,
    /// `floor(alpha_prime * p)` uniformly chosen all-zero columns, Bernoulli elsewhere.
    ColumnZeroed { alpha_prime: f64 },
    /// Each test contains every item or no item, with probability one half each.
    AllOrNone,
    /// `c` independent binary-splitting blocks for a single definite defective.
    Saffron { c: usize },
}

impl DesignKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DesignKind::ColumnZeroed { alpha_prime } if !(alpha_prime > 0.0 && alpha_prime < 1.0) => {
                Err(invalid(format!("alpha_prime must lie in (0,1), got {alpha_prime}")))
            }
            DesignKind::Saffron { c: 0 } => Err(invalid("saffron repetitions c must be >= 1")),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DesignKind::Bernoulli => "bernoulli".into(),
            DesignKind::ColumnZeroed { alpha_prime } => format!("column_zeroed({alpha_prime})"),
            DesignKind::AllOrNone => "all_or_none".into(),
            DesignKind::Saffron { c } => format!("saffron({c})"),
        }
    }
}

/// A design kind bound to a population and a test count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub kind: DesignKind,
    pub population: PopulationParams,
    pub n: usize,
}

impl DesignSpec {
    pub fn new(kind: DesignKind, population: PopulationParams, n: usize) -> Result<Self> {
        kind.validate()?;
        PopulationParams::new(population.p, population.k)?;
        Ok(Self { kind, population, n })
    }
}

/// Calls `hit(row, col)` for the ones of a row-major `rows x cols` array of
/// i.i.d. Bernoulli(`q`) entries, in increasing order, by sampling the
/// geometric gaps between ones through inversion.
fn scatter_bernoulli<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    q: f64,
    rng: &mut R,
    mut hit: impl FnMut(usize, usize),
) {
    if rows == 0 || cols == 0 || q <= 0.0 {
        return;
    }
    if q >= 1.0 {
        (0..rows).for_each(|i| (0..cols).for_each(|j| hit(i, j)));
        return;
    }
    let scale = 1.0 / (-q).ln_1p();
    let mut gap = || {
        let u = 1.0 - rng.random::<f64>();
        let g = (u.ln() * scale).floor();
        if g < usize::MAX as f64 {
            g as usize
        } else {
            usize::MAX
        }
    };
    let (mut row, mut col) = (0usize, gap());
    loop {
        if col >= cols {
            row = row.saturating_add(col / cols);
            col %= cols;
        }
        if row >= rows {
            return;
        }
        hit(row, col);
        col = col.saturating_add(1).saturating_add(gap());
    }
}

/// i.i.d. Bernoulli design: every entry is one with probability `nu / k`
/// where `nu` comes from [`solve_nu`].
pub fn gen_bernoulli<R: Rng + ?Sized>(params: PopulationParams, n: usize, rng: &mut R) -> Result<BitMatrix> {
    let params = PopulationParams::new(params.p, params.k)?;
    let bp = solve_nu(params.k)?;
    Ok(bernoulli_matrix(n, params.p, bp.q, rng))
}

pub(crate) fn bernoulli_matrix<R: Rng + ?Sized>(n: usize, p: usize, q: f64, rng: &mut R) -> BitMatrix {
    let mut x = BitMatrix::zeros(n, p);
    scatter_bernoulli(n, p, q, rng, |i, j| x.set(i, j, true));
    x
}

/// Single Bernoulli(`q`) row of length `p`.
pub fn bernoulli_row<R: Rng + ?Sized>(p: usize, q: f64, rng: &mut R) -> BitVec {
    let mut row = BitVec::zeros(p);
    scatter_bernoulli(1, p, q, rng, |_, j| row.set(j, true));
    row
}

/// Output of [`gen_column_zeroed`].
#[derive(Clone, Debug)]
pub struct ColumnZeroedDesign {
    pub matrix: BitMatrix,
    /// Zeroed columns, ascending.
    pub discarded: Vec<usize>,
    /// Surviving columns, ascending.
    pub survivors: Vec<usize>,
    /// Assumed defective count among survivors, `max(1, round((1 - alpha') k))`.
    pub k_bar: usize,
    /// Inclusion parameters re-solved for `k_bar`.
    pub bernoulli: BernoulliParams,
}

/// Bernoulli design on a random `1 - alpha'` fraction of the items.
///
/// `floor(alpha' p)` columns chosen uniformly are left all-zero; the rest are
/// i.i.d. with probability `nu(k_bar) / k_bar`.
pub fn gen_column_zeroed<R: Rng + ?Sized>(
    params: PopulationParams,
    n: usize,
    alpha_prime: f64,
    rng: &mut R,
) -> Result<ColumnZeroedDesign> {
    let params = PopulationParams::new(params.p, params.k)?;
    DesignKind::ColumnZeroed { alpha_prime }.validate()?;
    let dropped = (alpha_prime * params.p as f64).floor() as usize;
    if dropped == 0 || dropped >= params.p {
        return Err(Error::DegenerateDesign(format!(
            "floor(alpha' p) = {dropped} leaves no zeroed or no surviving column (p={})",
            params.p
        )));
    }
    let mut discarded = index::sample(rng, params.p, dropped).into_vec();
    discarded.sort_unstable();
    let mut zeroed = BitVec::from_indices(params.p, discarded.iter().copied());
    zeroed.negate();
    let survivors: Vec<usize> = zeroed.iter_ones().collect();

    let k_bar = (((1.0 - alpha_prime) * params.k as f64).round() as usize).max(1);
    let bernoulli = solve_nu(k_bar)?;
    let mut matrix = BitMatrix::zeros(n, params.p);
    scatter_bernoulli(n, survivors.len(), bernoulli.q, rng, |i, j| matrix.set(i, survivors[j], true));
    Ok(ColumnZeroedDesign { matrix, discarded, survivors, k_bar, bernoulli })
}

/// Each row is all-ones with probability one half, otherwise all-zeros.
pub fn gen_all_or_none<R: Rng + ?Sized>(p: usize, n: usize, rng: &mut R) -> BitMatrix {
    let mut x = BitMatrix::zeros(n, p);
    for i in 0..n {
        if rng.random::<bool>() {
            x.fill_row(i);
        }
    }
    x
}

/// Noiseless OR channel: `Y_i = 1` iff test `i` contains a defective.
pub fn apply_model(x: &BitMatrix, s: &DefectiveSet) -> Result<Outcomes> {
    if s.p() != x.cols() {
        return Err(invalid(format!("defective set over p={} but design has {} columns", s.p(), x.cols())));
    }
    let mut y = BitVec::zeros(x.rows());
    if s.k() <= x.stride() {
        for i in 0..x.rows() {
            if s.items().iter().any(|&j| x.get(i, j)) {
                y.set(i, true);
            }
        }
    } else {
        let mask = s.to_mask();
        for i in 0..x.rows() {
            if x.row_intersects(i, &mask) {
                y.set(i, true);
            }
        }
    }
    Ok(Outcomes::from_bits(y))
}

/// Draws `(X, Y)` from the null model: `X` from the design, `Y` uniform and independent.
pub fn sample_null<R: Rng + ?Sized>(spec: &DesignSpec, rng: &mut R) -> Result<(BitMatrix, Outcomes)> {
    let x = match spec.kind {
        DesignKind::Bernoulli => gen_bernoulli(spec.population, spec.n, rng)?,
        DesignKind::AllOrNone => gen_all_or_none(spec.population.p, spec.n, rng),
        other => return Err(Error::UnsupportedDesign(other.label())),
    };
    let y = Outcomes::uniform(spec.n, rng);
    Ok((x, y))
}

/// Header line of a design dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub p: usize,
    pub k: usize,
    pub n: usize,
    pub design: DesignKind,
    pub seed: u64,
}

/// Writes a one-line JSON header followed by the row-major hex dump.
pub fn write_dump<W: Write>(mut out: W, header: &DumpHeader, x: &BitMatrix) -> Result<()> {
    if header.p != x.cols() || header.n != x.rows() {
        return Err(invalid("dump header does not match matrix shape"));
    }
    serde_json::to_writer(&mut out, header)?;
    out.write_all(b"\n")?;
    x.write_hex(&mut out)?;
    Ok(())
}

pub fn read_dump<R: BufRead>(mut input: R) -> Result<(DumpHeader, BitMatrix)> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let header: DumpHeader = serde_json::from_str(first.trim_end())?;
    let x = BitMatrix::read_hex(input, header.n, header.p)?;
    Ok((header, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn nu_closed_form() {
        assert!(matches!(solve_nu(0), Err(Error::InvalidParameter(_))));
        let b1 = solve_nu(1).unwrap();
        assert!((b1.nu - 0.5).abs() < 1e-15);
        let b2 = solve_nu(2).unwrap();
        assert!((b2.nu - 0.585_786_437_626_905).abs() < 1e-12);
        assert!(((1.0 - b2.nu / 2.0).powi(2) - 0.5).abs() < 1e-12);
        let big = solve_nu(1_000_000).unwrap();
        assert!((big.nu - std::f64::consts::LN_2).abs() < 1e-6);
        for k in [1usize, 2, 3, 7, 100, 4096, 1_000_000] {
            let b = solve_nu(k).unwrap();
            assert!(((k as f64 * (-b.q).ln_1p()).exp() - 0.5).abs() < 1e-12, "k={k}");
            assert!(b.q > 0.0 && b.q < 1.0);
        }
    }

    #[test]
    fn empty_bernoulli_design() {
        let x = gen_bernoulli(PopulationParams::new(10, 2).unwrap(), 0, &mut rng_from_seed(7)).unwrap();
        assert_eq!((x.rows(), x.cols()), (0, 10));
    }

    #[test]
    fn bernoulli_is_seed_deterministic() {
        let pp = PopulationParams::new(300, 5).unwrap();
        let a = gen_bernoulli(pp, 40, &mut rng_from_seed(11)).unwrap();
        let b = gen_bernoulli(pp, 40, &mut rng_from_seed(11)).unwrap();
        let c = gen_bernoulli(pp, 40, &mut rng_from_seed(12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bernoulli_density_within_five_sigma() {
        let pp = PopulationParams::new(10_000, 10).unwrap();
        let x = gen_bernoulli(pp, 100, &mut rng_from_seed(1)).unwrap();
        // q = 1 - 2^(-1/10)
        let q = 1.0 - 2f64.powf(-0.1);
        assert!((q - 0.066_967).abs() < 1e-5);
        let total = 1e6;
        let sigma = (total * q * (1.0 - q)).sqrt();
        assert!((x.count_ones() as f64 - total * q).abs() < 5.0 * sigma);
    }

    #[test]
    fn column_zeroed_counts() {
        let pp = PopulationParams::new(10, 4).unwrap();
        let d = gen_column_zeroed(pp, 30, 0.5, &mut rng_from_seed(5)).unwrap();
        assert_eq!(d.discarded.len(), 5);
        assert_eq!(d.survivors.len(), 5);
        for &j in &d.discarded {
            assert_eq!(d.matrix.column_weight(j), 0);
        }
        assert_eq!(d.k_bar, 2);
        assert!((d.bernoulli.q - solve_nu(2).unwrap().q).abs() < 1e-15);
    }

    #[test]
    fn column_zeroed_degenerate() {
        let pp = PopulationParams::new(10, 2).unwrap();
        assert!(matches!(gen_column_zeroed(pp, 5, 0.05, &mut rng_from_seed(0)), Err(Error::DegenerateDesign(_))));
        assert!(matches!(gen_column_zeroed(pp, 5, 1.0, &mut rng_from_seed(0)), Err(Error::InvalidParameter(_))));
        assert!(matches!(gen_column_zeroed(pp, 5, 0.0, &mut rng_from_seed(0)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn k_bar_floor_of_one() {
        let pp = PopulationParams::new(100, 1).unwrap();
        let d = gen_column_zeroed(pp, 3, 0.9, &mut rng_from_seed(0)).unwrap();
        assert_eq!(d.k_bar, 1);
    }

    #[test]
    fn all_or_none_rows() {
        let x = gen_all_or_none(37, 1000, &mut rng_from_seed(2));
        let mut full = 0;
        for i in 0..x.rows() {
            let w = x.row_weight(i);
            assert!(w == 0 || w == 37);
            full += usize::from(w == 37);
        }
        let sigma = (1000.0f64 * 0.25).sqrt();
        assert!((full as f64 - 500.0).abs() < 5.0 * sigma);
        let s = DefectiveSet::new(37, vec![3, 30]).unwrap();
        let y = apply_model(&x, &s).unwrap();
        for i in 0..x.rows() {
            assert_eq!(y.get(i), x.row_weight(i) == 37);
        }
    }

    #[test]
    fn model_on_identity() {
        let x = BitMatrix::from_bools(&[vec![true, false, false], vec![false, true, false], vec![false, false, true]])
            .unwrap();
        let s = DefectiveSet::new(3, vec![1]).unwrap();
        assert_eq!(apply_model(&x, &s).unwrap().bits().to_bools(), vec![false, true, false]);
        let zero = BitMatrix::zeros(4, 3);
        assert!(apply_model(&zero, &s).unwrap().bits().none());
        let wrong = DefectiveSet::new(5, vec![4]).unwrap();
        assert!(apply_model(&x, &wrong).is_err());
    }

    #[test]
    fn defective_set_validation() {
        assert!(DefectiveSet::new(5, vec![]).is_err());
        assert!(DefectiveSet::new(5, vec![2, 2]).is_err());
        assert!(DefectiveSet::new(5, vec![3, 1]).is_err());
        assert!(DefectiveSet::new(5, vec![5]).is_err());
        assert_eq!(DefectiveSet::from_unsorted(5, vec![4, 1, 4]).unwrap().items(), &[1, 4]);
        let pp = PopulationParams::new(50, 7).unwrap();
        let s = DefectiveSet::sample(pp, &mut rng_from_seed(3));
        assert_eq!(s.k(), 7);
        assert!(DefectiveSet::new(50, s.items().to_vec()).is_ok());
    }

    #[test]
    fn null_model_rejects_other_designs() {
        let pp = PopulationParams::new(20, 2).unwrap();
        let spec = DesignSpec::new(DesignKind::Saffron { c: 1 }, pp, 4).unwrap();
        assert!(matches!(sample_null(&spec, &mut rng_from_seed(0)), Err(Error::UnsupportedDesign(_))));
        let spec = DesignSpec::new(DesignKind::Bernoulli, pp, 6).unwrap();
        let (x, y) = sample_null(&spec, &mut rng_from_seed(0)).unwrap();
        assert_eq!((x.rows(), x.cols(), y.len()), (6, 20, 6));
    }

    #[test]
    fn dump_round_trip() {
        let pp = PopulationParams::new(13, 2).unwrap();
        let x = gen_bernoulli(pp, 5, &mut rng_from_seed(4)).unwrap();
        let header = DumpHeader { p: 13, k: 2, n: 5, design: DesignKind::Bernoulli, seed: 4 };
        let mut buf = Vec::new();
        write_dump(&mut buf, &header, &x).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("{\"p\":13,\"k\":2,\"n\":5,\"design\":{\"kind\":\"bernoulli\"},\"seed\":4}\n"));
        assert_eq!(text.lines().count(), 6);
        let (h, back) = read_dump(buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(back, x);
    }
}
