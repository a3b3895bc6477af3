//! Linear index codes and the per-receiver quantities that drive the mapping.

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector, MaskBasis};
use crate::problem::IndexCodingProblem;

/// A linear index code: problem plus an `n x l` encoding matrix `L`, `y = xL`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCode {
    problem: IndexCodingProblem,
    matrix: BitMatrix,
    row_masks: Vec<u64>,
    column_masks: Vec<u64>,
}

/// Side-information structure of one receiver under a given code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverAnalysis {
    pub receiver: usize,
    /// Codeword bits (zero-based columns of `L`) the receiver can compute from its side information.
    pub known_bits: Vec<usize>,
    pub eta: usize,
    /// `eta < l`: the receiver sees fewer than `2^l` points.
    pub gains_sicg: bool,
}

impl IndexCode {
    /// Pairs a problem with an encoding matrix. Only shapes are checked here;
    /// see [`IndexCode::check_mappable`] for rank and decodability.
    pub fn new(problem: IndexCodingProblem, matrix: BitMatrix) -> Result<Self> {
        if matrix.rows() != problem.messages() {
            return Err(Error::DimensionMismatch {
                context: "encoding matrix rows vs message count",
                expected: problem.messages(),
                found: matrix.rows(),
            });
        }
        if matrix.cols() > 64 {
            return Err(Error::DimensionMismatch {
                context: "encoding matrix columns (at most 64)",
                expected: 64,
                found: matrix.cols(),
            });
        }
        let row_masks = (0..matrix.rows()).map(|r| matrix.row_mask(r)).collect();
        let column_masks = (0..matrix.cols()).map(|c| matrix.column_mask(c)).collect();
        Ok(Self {
            problem,
            matrix,
            row_masks,
            column_masks,
        })
    }

    /// The uncoded scheme `L = I_n`.
    pub fn uncoded(problem: IndexCodingProblem) -> Self {
        let n = problem.messages();
        Self::new(problem, BitMatrix::identity(n)).expect("identity has matching shape")
    }

    pub fn problem(&self) -> &IndexCodingProblem {
        &self.problem
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// Code length `l`.
    pub fn length(&self) -> usize {
        self.matrix.cols()
    }

    /// Row `k` of `L`, packed (bit `j` is `L[k][j]`).
    pub fn row_mask(&self, k: usize) -> u64 {
        self.row_masks[k]
    }

    /// Encodes a packed message vector (bit `k` is `x_{k+1}`) into a packed codeword.
    pub fn encode(&self, x: u64) -> u64 {
        let mut y = 0;
        let mut rest = x;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            y ^= self.row_masks[k];
            rest &= rest - 1;
        }
        y
    }

    pub fn encode_vector(&self, x: &BitVector) -> Result<BitVector> {
        gf2::mat_vec_mul(x, &self.matrix)
    }

    /// Number of distinct codewords, `2^rank(L)`.
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Set `S_i`: columns of `L` whose support lies inside `K_i`.
    pub fn known_transmissions(&self, i: usize) -> Result<Vec<usize>> {
        let known = self.problem.receiver(i)?.knows_mask();
        Ok(self
            .column_masks
            .iter()
            .enumerate()
            .filter(|(_, &col)| col & !known == 0)
            .map(|(j, _)| j)
            .collect())
    }

    /// `eta_i = min(n - |K_i|, l - |S_i|)`.
    pub fn eta(&self, i: usize) -> Result<usize> {
        let rx = self.problem.receiver(i)?;
        let s = self.known_transmissions(i)?.len();
        let unknown_messages = self.problem.messages() - rx.knows().len();
        Ok(unknown_messages.min(self.length().saturating_sub(s)))
    }

    pub fn analyze(&self, i: usize) -> Result<ReceiverAnalysis> {
        let eta = self.eta(i)?;
        Ok(ReceiverAnalysis {
            receiver: i,
            known_bits: self.known_transmissions(i)?,
            eta,
            gains_sicg: eta < self.length(),
        })
    }

    pub fn analyze_all(&self) -> Vec<ReceiverAnalysis> {
        (0..self.problem.receivers().len())
            .map(|i| self.analyze(i).expect("index in range"))
            .collect()
    }

    /// Mask of message positions receiver `i` does not know.
    pub(crate) fn unknown_mask(&self, i: usize) -> u64 {
        self.problem.message_mask() & !self.problem.receivers()[i].knows_mask()
    }

    /// Linear decodability: every wanted `e_w` lies in the span of the
    /// columns of `L` together with `{e_k : k in K_i}`.
    pub fn decodable(&self, i: usize) -> Result<bool> {
        let rx = self.problem.receiver(i)?;
        let unknown = self.unknown_mask(i);
        let mut basis = MaskBasis::default();
        for &col in &self.column_masks {
            basis.insert(col & unknown);
        }
        Ok(rx.wants().iter().all(|&w| basis.contains(1 << w)))
    }

    pub fn all_decodable(&self) -> bool {
        (0..self.problem.receivers().len()).all(|i| self.decodable(i).unwrap_or(false))
    }

    /// Rank of the rows of `L` indexed by messages receiver `i` does not know.
    /// The receiver's effective constellation has `2^unknown_rank` points.
    pub fn unknown_rank(&self, i: usize) -> usize {
        let unknown = self.unknown_mask(i);
        gf2::rank_of_masks(
            self.row_masks
                .iter()
                .enumerate()
                .filter(|(k, _)| unknown >> k & 1 == 1)
                .map(|(_, &r)| r),
        )
    }

    /// Preconditions of the QAM mapper: full column rank and every receiver decodable.
    pub fn check_mappable(&self) -> Result<()> {
        let rank = self.rank();
        if rank != self.length() {
            return Err(Error::RankDeficient {
                rank,
                l: self.length(),
            });
        }
        for i in 0..self.problem.receivers().len() {
            if !self.decodable(i)? {
                return Err(Error::NotDecodable { receiver: i + 1 });
            }
        }
        Ok(())
    }

    /// Bandwidth gain of one `2^l`-QAM symbol over `l` binary transmissions: `l / 2`.
    pub fn bandwidth_gain(&self) -> f64 {
        bandwidth_gain(self.length())
    }
}

/// `l / 2`-fold reduction in complex channel uses.
pub fn bandwidth_gain(l: usize) -> f64 {
    l as f64 / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::problem::Receiver;
    use proptest::prelude::*;

    fn one_based(v: Vec<usize>) -> Vec<usize> {
        v.into_iter().map(|j| j + 1).collect()
    }

    #[test]
    fn example1_known_transmissions() {
        let code = fixtures::example1();
        assert_eq!(one_based(code.known_transmissions(0).unwrap()), vec![2, 3, 4]);
        assert!(code.known_transmissions(6).unwrap().is_empty());
        assert!(code.known_transmissions(7).is_err());
    }

    #[test]
    fn example2_known_transmissions() {
        let code = fixtures::example2_l2();
        assert_eq!(one_based(code.known_transmissions(0).unwrap()), vec![2, 3, 4]);
    }

    fn etas(code: &IndexCode) -> Vec<usize> {
        code.analyze_all().iter().map(|a| a.eta).collect()
    }

    #[test]
    fn eta_vectors() {
        assert_eq!(etas(&fixtures::example1()), vec![1, 2, 2, 4, 4, 4, 4]);
        assert_eq!(etas(&fixtures::example2_l1()), vec![1, 2, 3, 3, 3]);
        assert_eq!(etas(&fixtures::example2_l2()), vec![1, 2, 3, 4, 4]);
        assert_eq!(etas(&fixtures::example2_l3()), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn eta_of_receiver_missing_one_message_is_one() {
        let p = IndexCodingProblem::new(4, vec![Receiver::one_based(&[2], &[1, 3, 4])]).unwrap();
        let code = IndexCode::uncoded(p);
        assert_eq!(code.eta(0).unwrap(), 1);
    }

    #[test]
    fn sicg_predicate_follows_eta() {
        let analysis = fixtures::example1().analyze_all();
        let gains: Vec<bool> = analysis.iter().map(|a| a.gains_sicg).collect();
        assert_eq!(gains, vec![true, true, true, false, false, false, false]);
    }

    #[test]
    fn decodability() {
        let code = fixtures::example1();
        assert!((0..7).all(|i| code.decodable(i).unwrap()));

        let p = fixtures::example1().problem().clone();
        let zero = IndexCode::new(p.clone(), BitMatrix::zeros(7, 4)).unwrap();
        assert!(!zero.decodable(6).unwrap());
        assert!(IndexCode::uncoded(p).all_decodable());
    }

    #[test]
    fn mappable_checks() {
        assert!(fixtures::example1().check_mappable().is_ok());
        let p = fixtures::example1().problem().clone();
        let deficient = IndexCode::new(p, BitMatrix::zeros(7, 2)).unwrap();
        assert!(matches!(
            deficient.check_mappable(),
            Err(Error::RankDeficient { rank: 0, l: 2 })
        ));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let p = fixtures::example1().problem().clone();
        assert!(IndexCode::new(p, BitMatrix::identity(5)).is_err());
    }

    #[test]
    fn bandwidth_gains() {
        assert_eq!(fixtures::example1().bandwidth_gain(), 2.0);
        assert_eq!(fixtures::example2_l1().bandwidth_gain(), 1.5);
        assert_eq!(bandwidth_gain(2), 1.0);
    }

    #[test]
    fn encode_matches_matrix_product() {
        let code = fixtures::example1();
        for x in 0u64..128 {
            let v = BitVector::from_u64(7, x);
            assert_eq!(code.encode_vector(&v).unwrap().to_u64(), Some(code.encode(x)));
        }
    }

    fn arb_instance() -> impl Strategy<Value = (usize, Vec<u64>, Vec<u64>, u64)> {
        (2usize..7, 1usize..6).prop_flat_map(|(n, l)| {
            (
                Just(n),
                proptest::collection::vec(0u64..(1 << l), n),
                proptest::collection::vec(0u64..(1 << n), n),
                0u64..(1 << n),
            )
        })
    }

    fn problem_from(n: usize, knows: &[u64]) -> IndexCodingProblem {
        let receivers = (0..n)
            .map(|i| Receiver::new([i], (0..n).filter(|&k| k != i && knows[i] >> k & 1 == 1)))
            .collect();
        IndexCodingProblem::new(n, receivers).unwrap()
    }

    proptest! {
        #[test]
        fn known_bits_have_support_in_side_information((n, rows, knows, _) in arb_instance()) {
            let l = rows.iter().fold(0, |acc, r| acc | r).max(1);
            let cols = 64 - l.leading_zeros() as usize;
            let code = IndexCode::new(problem_from(n, &knows), BitMatrix::from_row_masks(cols, &rows)).unwrap();
            for i in 0..n {
                let known = code.problem().receivers()[i].knows_mask();
                for j in code.known_transmissions(i).unwrap() {
                    prop_assert_eq!(code.matrix().column_mask(j) & !known, 0);
                }
                let eta = code.eta(i).unwrap();
                prop_assert!(eta <= code.length());
                prop_assert!(eta <= n - code.problem().receivers()[i].knows().len());
                prop_assert!(code.unknown_rank(i) <= eta);
            }
        }

        #[test]
        fn eta_does_not_grow_with_more_side_information((n, rows, knows, extra) in arb_instance()) {
            let l = rows.iter().fold(0, |acc, r| acc | r).max(1);
            let cols = 64 - l.leading_zeros() as usize;
            let matrix = BitMatrix::from_row_masks(cols, &rows);
            let base = IndexCode::new(problem_from(n, &knows), matrix.clone()).unwrap();
            let grown: Vec<u64> = knows.iter().map(|k| k | extra).collect();
            let richer = IndexCode::new(problem_from(n, &grown), matrix).unwrap();
            for i in 0..n {
                prop_assert!(richer.eta(i).unwrap() <= base.eta(i).unwrap());
            }
        }
    }
}
