//! Exact minrank over GF(2): the length of an optimal linear index code.
//!
//! Decodability depends only on the column space `V` of `L`, so the search
//! walks subspaces of `F_2^n` by increasing dimension and stops at the first
//! `V` with `e_w in V + span{e_k : k in K_i}` for every receiver and demand.

use crate::code::IndexCode;
use crate::error::Result;
use crate::gf2::{check_search_guard, BitMatrix, MaskBasis, RrefMasks};
use crate::problem::IndexCodingProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minrank {
    /// Optimal code length `N`.
    pub length: usize,
    /// An `n x N` encoding matrix achieving it; the first in enumeration order.
    pub witness: BitMatrix,
}

impl Minrank {
    pub fn code(&self, problem: &IndexCodingProblem) -> IndexCode {
        IndexCode::new(problem.clone(), self.witness.clone()).expect("witness has n rows")
    }
}

struct Demand {
    unknown: u64,
    wants: Vec<u64>,
}

/// Computes the minrank of `problem` by exhaustive subspace search (`n <= 16`).
pub fn minrank(problem: &IndexCodingProblem) -> Result<Minrank> {
    let n = problem.messages();
    check_search_guard(n)?;
    let demands: Vec<Demand> = problem
        .receivers()
        .iter()
        .map(|r| Demand {
            unknown: problem.message_mask() & !r.knows_mask(),
            wants: r.wants().iter().map(|&w| 1u64 << w).collect(),
        })
        .collect();

    let mut rows = Vec::with_capacity(n);
    for d in 1..=n {
        let mut subspaces = RrefMasks::new(n, d);
        while subspaces.next_into(&mut rows) {
            if satisfies(&rows, &demands) {
                let basis = BitMatrix::from_row_masks(n, &rows);
                return Ok(Minrank {
                    length: d,
                    witness: basis.transpose(),
                });
            }
        }
    }
    unreachable!("the full space F_2^n always satisfies every demand")
}

fn satisfies(basis: &[u64], demands: &[Demand]) -> bool {
    demands.iter().all(|demand| {
        let mut projected = MaskBasis::default();
        for &v in basis {
            projected.insert(v & demand.unknown);
        }
        projected.dim() > 0 && demand.wants.iter().all(|&w| projected.contains(w))
    })
}
