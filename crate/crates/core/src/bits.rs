//! Packed bit storage: a growable-free [`BitVec`] and a row-major [`BitMatrix`].
//!
//! Bits are stored least-significant-first inside `u64` words; bit `j` of a
//! row lives in word `j / 64` at position `j % 64`. Padding bits past the
//! logical length are always zero, which lets popcounts and word-wise
//! comparisons ignore the tail.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Fixed-length packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self { len, words: vec![u64::MAX; words_for(len)] };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with ones at `indices`. Panics on an index `>= len`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    pub fn all(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> Ones<'_> {
        Ones { words: &self.words, index: 0, current: self.words.first().copied().unwrap_or(0) }
    }

    pub fn intersects(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn or_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and_not_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn negate(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.clear_tail();
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        write!(f, "]")
    }
}

/// Iterator over set-bit indices.
pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + tz);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Row-major binary matrix. Row `i` is a test, column `j` an item.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, words: vec![0; rows * stride] }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(invalid(format!("row {i} has length {}, expected {cols}", r.len())));
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn from_bools(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let rows: Vec<BitVec> = rows.iter().map(|r| BitVec::from_bools(r)).collect();
        Self::from_rows(cols, &rows)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Words per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        self.words[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        let w = &mut self.words[i * self.stride + j / WORD];
        let bit = 1u64 << (j % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(i).to_vec())
    }

    /// Sets every entry of row `i` to one.
    pub fn fill_row(&mut self, i: usize) {
        let cols = self.cols;
        let row = self.row_words_mut(i);
        row.fill(u64::MAX);
        if let Some(last) = row.last_mut() {
            *last &= tail_mask(cols);
        }
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_intersects(&self, i: usize, mask: &BitVec) -> bool {
        assert_eq!(mask.len(), self.cols, "mask length mismatch");
        self.row_words(i).iter().zip(mask.words()).any(|(a, b)| a & b != 0)
    }

    pub fn iter_row_ones(&self, i: usize) -> Ones<'_> {
        let words = self.row_words(i);
        Ones { words, index: 0, current: words.first().copied().unwrap_or(0) }
    }

    /// Column `j` as a length-`rows` vector.
    pub fn column(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn column_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bitwise OR of the rows selected by `select`, as a length-`cols` vector.
    pub fn or_of_rows<F: Fn(usize) -> bool>(&self, select: F) -> BitVec {
        let mut acc = vec![0u64; self.stride];
        for i in (0..self.rows).filter(|&i| select(i)) {
            for (a, w) in acc.iter_mut().zip(self.row_words(i)) {
                *a |= w;
            }
        }
        BitVec::from_words(self.cols, acc)
    }

    /// Matrix restricted to the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, columns.len());
        for i in 0..self.rows {
            for (c, &j) in columns.iter().enumerate() {
                if self.get(i, j) {
                    m.set(i, c, true);
                }
            }
        }
        m
    }

    /// Writes the matrix as `rows` lines of hexadecimal text.
    ///
    /// Each line encodes one row as `ceil(cols / 4)` lowercase hex digits.
    /// Column `4d + t` is bit `3 - t` of digit `d` (column 0 is the high bit
    /// of the first digit); columns past `cols` in the last digit are zero.
    /// A single-row, 6-column matrix with ones at columns 0 and 5 is `84`.
    pub fn write_hex<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let digits = self.cols.div_ceil(4);
        let mut line = String::with_capacity(digits + 1);
        for i in 0..self.rows {
            line.clear();
            for d in 0..digits {
                let mut nibble = 0u32;
                for t in 0..4 {
                    let j = 4 * d + t;
                    if j < self.cols && self.get(i, j) {
                        nibble |= 1 << (3 - t);
                    }
                }
                line.push(char::from_digit(nibble, 16).expect("nibble < 16"));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Parses `rows` lines written by [`BitMatrix::write_hex`].
    pub fn read_hex<R: BufRead>(input: R, rows: usize, cols: usize) -> Result<Self> {
        let digits = cols.div_ceil(4);
        let mut m = BitMatrix::zeros(rows, cols);
        let mut lines = input.lines();
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::InvalidDesign(format!("hex dump ended after {i} of {rows} rows")))??;
            let line = line.trim_end();
            if line.len() != digits {
                return Err(Error::InvalidDesign(format!(
                    "row {i}: expected {digits} hex digits, found {}",
                    line.len()
                )));
            }
            for (d, ch) in line.chars().enumerate() {
                let nibble =
                    ch.to_digit(16).ok_or_else(|| Error::InvalidDesign(format!("row {i}: bad hex digit {ch:?}")))?;
                for t in 0..4 {
                    let j = 4 * d + t;
                    let bit = nibble >> (3 - t) & 1 == 1;
                    if j < cols {
                        m.set(i, j, bit);
                    } else if bit {
                        return Err(Error::InvalidDesign(format!("row {i}: nonzero padding bit")));
                    }
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
