//! Linear algebra over GF(2).
//!
//! Vectors are packed into 64-bit words. Values have plain value semantics:
//! every operation that produces a vector or matrix returns a fresh one.
//!
//! Bit `i` of a [`BitVector`] is coordinate `i` (zero-based), so message
//! `x_1` lives in bit 0 and codeword bit `y_1` lives in bit 0 as well.

use std::fmt;

use crate::error::{Error, Result};

/// Largest ambient dimension accepted by [`enumerate_subspaces`].
pub const SUBSPACE_SEARCH_LIMIT: usize = 16;

const WORD_BITS: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zero vector of the given length.
    ///
    /// # Panics
    /// Panics if `len == 0`.
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "bit vectors must have positive length");
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// Indicator vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Builds a vector from 0/1 entries. Any nonzero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len <= 64` whose bit `i` is bit `i` of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        v.words[0] = value & low_mask(len);
        v
    }

    /// Packs the vector into a `u64` if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        (self.len <= WORD_BITS).then(|| self.words[0])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Lowest set bit, if any.
    pub fn leading_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// `self ^= other`.
    ///
    /// # Panics
    /// Panics on length mismatch.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Entries as 0/1 bytes.
    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn low_mask(len: usize) -> u64 {
    if len >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A dense matrix over GF(2), stored by rows.
///
/// A matrix may have zero rows (an empty basis); it always has at least one column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: (0..rows).map(|_| BitVector::zeros(cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from row vectors of equal length `cols`.
    pub fn from_row_vectors(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "matrix row length",
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Builds a matrix from nested 0/1 rows. All rows must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if cols == 0 {
            return Err(Error::DimensionMismatch {
                context: "matrix column count",
                expected: 1,
                found: 0,
            });
        }
        Self::from_row_vectors(
            cols,
            rows.iter().map(|r| BitVector::from_bits(r.as_ref())).collect(),
        )
    }

    /// Builds an `n x cols` matrix from packed rows (bit `j` of `rows[i]` is entry `(i, j)`).
    pub fn from_row_masks(cols: usize, rows: &[u64]) -> Self {
        Self {
            cols,
            rows: rows.iter().map(|&r| BitVector::from_u64(cols, r)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows.len().max(1));
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                v.set(r, true);
            }
        }
        v
    }

    /// Column `c` packed into a `u64`; requires at most 64 rows.
    pub fn column_mask(&self, c: usize) -> u64 {
        assert!(self.rows.len() <= WORD_BITS);
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row.get(c))
            .fold(0, |acc, (r, _)| acc | 1 << r)
    }

    /// Row `r` packed into a `u64`; requires at most 64 columns.
    pub fn row_mask(&self, r: usize) -> u64 {
        self.rows[r].to_u64().expect("row longer than 64 bits")
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Rows as nested 0/1 vectors.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(BitVector::to_bits).collect()
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

/// `y = x L` over GF(2).
pub fn mat_vec_mul(x: &BitVector, l: &BitMatrix) -> Result<BitVector> {
    if x.len() != l.rows() {
        return Err(Error::DimensionMismatch {
            context: "message length vs encoding matrix rows",
            expected: l.rows(),
            found: x.len(),
        });
    }
    let mut y = BitVector::zeros(l.cols());
    for i in x.ones() {
        y.xor_assign(l.row(i));
    }
    Ok(y)
}

/// Incremental echelon basis used by `rank` and `in_span`.
#[derive(Default)]
struct EchelonBasis {
    // (pivot column, vector); each pivot is the lowest set bit of its vector
    rows: Vec<(usize, BitVector)>,
}

impl EchelonBasis {
    fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
            }
        }
        v
    }

    fn insert(&mut self, v: &BitVector) -> bool {
        let reduced = self.reduce(v);
        match reduced.leading_one() {
            None => false,
            Some(pivot) => {
                for (_, row) in self.rows.iter_mut() {
                    if row.get(pivot) {
                        row.xor_assign(&reduced);
                    }
                }
                self.rows.push((pivot, reduced));
                true
            }
        }
    }
}

/// Rank over GF(2) by row reduction.
pub fn rank(m: &BitMatrix) -> usize {
    let mut basis = EchelonBasis::default();
    m.row_vectors().iter().filter(|r| basis.insert(r)).count()
}

/// Whether `v` lies in the GF(2) span of `basis`.
pub fn in_span(v: &BitVector, basis: &[BitVector]) -> Result<bool> {
    let mut echelon = EchelonBasis::default();
    for b in basis {
        if b.len() != v.len() {
            return Err(Error::DimensionMismatch {
                context: "span membership vector length",
                expected: v.len(),
                found: b.len(),
            });
        }
        echelon.insert(b);
    }
    Ok(echelon.reduce(v).is_zero())
}

/// Rank of a set of packed vectors.
pub(crate) fn rank_of_masks(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis = MaskBasis::default();
    vectors.into_iter().filter(|&v| basis.insert(v)).count()
}

/// Echelon basis over packed `u64` vectors, used on hot paths.
#[derive(Clone, Default, Debug)]
pub(crate) struct MaskBasis {
    rows: Vec<u64>,
}

impl MaskBasis {
    /// Reduces `v` against the basis. The result is canonical for the coset `v + span`.
    pub(crate) fn reduce(&self, mut v: u64) -> u64 {
        for &row in &self.rows {
            let pivot = row & row.wrapping_neg();
            if v & pivot != 0 {
                v ^= row;
            }
        }
        v
    }

    pub(crate) fn insert(&mut self, v: u64) -> bool {
        let reduced = self.reduce(v);
        if reduced == 0 {
            return false;
        }
        let pivot = reduced & reduced.wrapping_neg();
        for row in self.rows.iter_mut() {
            if *row & pivot != 0 {
                *row ^= reduced;
            }
        }
        self.rows.push(reduced);
        true
    }

    pub(crate) fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn rows(&self) -> &[u64] {
        &self.rows
    }
}

/// Generator of reduced-row-echelon bases, as packed rows, in lexicographic pivot order.
pub(crate) struct RrefMasks {
    n: usize,
    pivots: Vec<usize>,
    // (row, column) positions left free by the current pivot pattern
    free: Vec<(usize, usize)>,
    counter: u64,
    done: bool,
}

impl RrefMasks {
    pub(crate) fn new(n: usize, d: usize) -> Self {
        let mut it = Self {
            n,
            pivots: (0..d).collect(),
            free: Vec::new(),
            counter: 0,
            done: d > n,
        };
        it.refresh_free();
        it
    }

    fn refresh_free(&mut self) {
        self.free.clear();
        for (r, &p) in self.pivots.iter().enumerate() {
            for c in p + 1..self.n {
                if !self.pivots.contains(&c) {
                    self.free.push((r, c));
                }
            }
        }
    }

    // next pivot combination in lexicographic order
    fn advance_pivots(&mut self) -> bool {
        let d = self.pivots.len();
        let n = self.n;
        let Some(k) = (0..d).rev().find(|&k| self.pivots[k] < n - d + k) else {
            return false;
        };
        self.pivots[k] += 1;
        for j in k + 1..d {
            self.pivots[j] = self.pivots[j - 1] + 1;
        }
        true
    }

    /// Writes the next basis into `rows`; returns false when exhausted.
    pub(crate) fn next_into(&mut self, rows: &mut Vec<u64>) -> bool {
        if self.done {
            return false;
        }
        rows.clear();
        rows.extend(self.pivots.iter().map(|&p| 1u64 << p));
        for (bit, &(r, c)) in self.free.iter().enumerate() {
            if self.counter >> bit & 1 == 1 {
                rows[r] |= 1 << c;
            }
        }
        self.counter += 1;
        if self.counter >> self.free.len() != 0 {
            self.counter = 0;
            if self.advance_pivots() {
                self.refresh_free();
            } else {
                self.done = true;
            }
        }
        true
    }
}

/// Stream of all `d`-dimensional subspaces of `F_2^n`, one reduced-row-echelon
/// basis (a `d x n` matrix) per subspace.
pub struct SubspaceIter {
    n: usize,
    inner: RrefMasks,
    buf: Vec<u64>,
}

impl Iterator for SubspaceIter {
    type Item = BitMatrix;

    fn next(&mut self) -> Option<BitMatrix> {
        self.inner
            .next_into(&mut self.buf)
            .then(|| BitMatrix::from_row_masks(self.n, &self.buf))
    }
}

/// Enumerates the `d`-dimensional subspaces of `F_2^n` in lexicographic pivot order.
///
/// The count equals the Gaussian binomial coefficient `[n choose d]_2`. Ambient
/// dimensions above [`SUBSPACE_SEARCH_LIMIT`] are rejected.
pub fn enumerate_subspaces(n: usize, d: usize) -> Result<SubspaceIter> {
    check_search_guard(n)?;
    if n == 0 || d > n {
        return Err(Error::DimensionMismatch {
            context: "subspace dimension must satisfy 0 <= d <= n, n >= 1",
            expected: n,
            found: d,
        });
    }
    Ok(SubspaceIter {
        n,
        inner: RrefMasks::new(n, d),
        buf: Vec::with_capacity(d),
    })
}

pub(crate) fn check_search_guard(n: usize) -> Result<()> {
    if n > SUBSPACE_SEARCH_LIMIT {
        return Err(Error::SearchGuard {
            n,
            limit: SUBSPACE_SEARCH_LIMIT,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn example1_l() -> BitMatrix {
        BitMatrix::from_rows(&[
            [1u8, 0, 0, 0],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn mat_vec_mul_examples() {
        let l = example1_l();
        let zero = BitVector::zeros(7);
        assert!(mat_vec_mul(&zero, &l).unwrap().is_zero());

        // y1 = x1+x2+x5, y2 = x3+x6, y3 = x4, y4 = x7
        let x = BitVector::from_bits(&[1, 0, 0, 0, 1, 0, 1]);
        assert_eq!(mat_vec_mul(&x, &l).unwrap().to_bits(), vec![0, 0, 0, 1]);

        let id = BitMatrix::identity(5);
        let x = BitVector::from_bits(&[1, 1, 0, 1, 0]);
        assert_eq!(mat_vec_mul(&x, &id).unwrap(), x);
    }

    #[test]
    fn mat_vec_mul_rejects_mismatch() {
        let err = mat_vec_mul(&BitVector::zeros(3), &example1_l()).unwrap_err();
        assert!(err.to_string().contains("expected 7, found 3"), "{err}");
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&BitMatrix::zeros(4, 6)), 0);
        assert_eq!(rank(&example1_l()), 4);
        assert_eq!(rank(&BitMatrix::identity(9)), 9);
    }

    #[test]
    fn in_span_examples() {
        let e = |i| BitVector::unit(3, i);
        assert!(in_span(&BitVector::zeros(3), &[e(1)]).unwrap());
        assert!(in_span(&e(0), &[e(0).xor(&e(1)), e(1)]).unwrap());
        assert!(!in_span(&e(2), &[e(0), e(1)]).unwrap());
        assert!(in_span(&e(0), &[BitVector::zeros(4)]).is_err());
    }

    #[test]
    fn wide_vectors_cross_word_boundaries() {
        let mut a = BitVector::zeros(130);
        a.set(3, true);
        a.set(127, true);
        let b = BitVector::unit(130, 127);
        assert_eq!(a.xor(&b).ones().collect::<Vec<_>>(), vec![3]);
        assert!(a.dot(&b));
        assert_eq!(a.leading_one(), Some(3));
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(enumerate_subspaces(2, 1).unwrap().count(), 3);
        assert_eq!(enumerate_subspaces(3, 3).unwrap().count(), 1);
        assert_eq!(enumerate_subspaces(4, 2).unwrap().count(), 35);
        assert_eq!(enumerate_subspaces(4, 0).unwrap().count(), 1);
    }

    #[test]
    fn subspace_guard() {
        assert!(matches!(
            enumerate_subspaces(17, 2),
            Err(Error::SearchGuard { n: 17, .. })
        ));
        assert!(enumerate_subspaces(3, 4).is_err());
    }

    #[test]
    fn subspaces_come_in_pivot_order() {
        let first: Vec<_> = enumerate_subspaces(3, 2).unwrap().take(1).collect();
        assert_eq!(first[0].to_rows(), vec![vec![1, 0, 0], vec![0, 1, 0]]);
    }

    // Independent count: number of ordered bases of a d-subspace divided out
    // of the number of ordered d-tuples of independent vectors.
    fn gaussian_binomial(n: u32, d: u32) -> u128 {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..d {
            num *= (1u128 << n) - (1u128 << i);
            den *= (1u128 << d) - (1u128 << i);
        }
        num / den
    }

    fn span_of(m: &BitMatrix) -> Vec<u64> {
        let rows: Vec<u64> = (0..m.rows()).map(|r| m.row_mask(r)).collect();
        let mut span: Vec<u64> = (0u64..1 << rows.len())
            .map(|sel| {
                rows.iter()
                    .enumerate()
                    .filter(|(k, _)| sel >> k & 1 == 1)
                    .fold(0, |acc, (_, r)| acc ^ r)
            })
            .collect();
        span.sort_unstable();
        span
    }

    #[test]
    fn subspaces_are_distinct_and_complete() {
        for n in 1..=6usize {
            for d in 0..=n {
                let spaces: Vec<_> = enumerate_subspaces(n, d).unwrap().collect();
                assert_eq!(
                    spaces.len() as u128,
                    gaussian_binomial(n as u32, d as u32),
                    "n={n} d={d}"
                );
                let distinct: HashSet<_> = spaces.iter().map(span_of).collect();
                assert_eq!(distinct.len(), spaces.len());
                assert!(spaces.iter().all(|m| m.rank() == d));
            }
        }
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, c), r)
                .prop_map(|rows| BitMatrix::from_rows(&rows).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in arb_matrix(12)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
        }

        #[test]
        fn encoding_is_linear(
            rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 5), 8),
            a in proptest::collection::vec(0u8..2, 8),
            b in proptest::collection::vec(0u8..2, 8),
        ) {
            let l = BitMatrix::from_rows(&rows).unwrap();
            let (a, b) = (BitVector::from_bits(&a), BitVector::from_bits(&b));
            let lhs = mat_vec_mul(&a.xor(&b), &l).unwrap();
            let rhs = mat_vec_mul(&a, &l).unwrap().xor(&mat_vec_mul(&b, &l).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mask_basis_agrees_with_rank(rows in proptest::collection::vec(0u64..256, 0..10)) {
            let m = BitMatrix::from_row_masks(8, &rows);
            prop_assert_eq!(rank_of_masks(rows.iter().copied()), m.rank());
        }
    }
}
