#![allow(dead_code)]

use qamic::{IndexCodingProblem, Receiver};
use rand::Rng;

/// GF(2) rank of packed rows by plain elimination, kept apart from the library's.
pub fn rank_rows(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let Some(pos) = rows[rank..].iter().position(|r| r >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, rank + pos);
        let pivot = rows[rank];
        for (k, r) in rows.iter_mut().enumerate() {
            if k != rank && *r >> bit & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Minrank of a single-unicast problem as the smallest rank of a fitting
/// matrix: row `i` has a one at the wanted message, free entries on known
/// messages and zeros elsewhere.
pub fn fitting_minrank(problem: &IndexCodingProblem) -> usize {
    let receivers = problem.receivers();
    assert!(receivers.iter().all(|r| r.wants().len() == 1), "single-unicast only");
    let free: Vec<(usize, usize)> = receivers
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.knows().iter().map(move |&k| (i, k)))
        .collect();
    assert!(free.len() <= 24, "too many free entries for brute force");
    let base: Vec<u64> = receivers.iter().map(|r| 1u64 << r.wants()[0]).collect();
    let mut best = usize::MAX;
    let mut rows = base.clone();
    for fill in 0u64..1 << free.len() {
        rows.copy_from_slice(&base);
        for (b, &(i, k)) in free.iter().enumerate() {
            if fill >> b & 1 == 1 {
                rows[i] |= 1 << k;
            }
        }
        best = best.min(rank_rows(&rows));
        if best == 1 {
            break;
        }
    }
    best
}

/// Receiver `i` wants message `i` and knows each other message with probability one half.
pub fn random_single_unicast<R: Rng>(rng: &mut R, n: usize) -> IndexCodingProblem {
    let receivers = (0..n)
        .map(|i| Receiver::new([i], (0..n).filter(|&j| j != i && rng.random_bool(0.5)).collect::<Vec<_>>()))
        .collect();
    IndexCodingProblem::new(n, receivers).expect("generated problem is valid")
}

pub fn assert_close(found: &[f64], expected: &[f64], tol: f64) -> bool {
    found.len() == expected.len() && found.iter().zip(expected).all(|(f, e)| (f - e).abs() <= tol)
}
