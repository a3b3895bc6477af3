//! Greedy labeling of index codewords onto a partitioned QAM set.
//!
//! Receivers with few unknown codeword bits (`eta`) are given priority: for
//! each of their side-information realizations, the codewords they still
//! have to tell apart are packed into one subset deep in the Ungerboeck tree,
//! so the points they see are far apart.
//!
//! Scheduling: prioritized receivers are visited in non-decreasing `eta`. In
//! each step the first prioritized receiver that has a partially placed
//! coset continues it; only when no receiver has partial work does the first
//! receiver with anything left open a fresh coset. This keeps the top
//! receiver's guarantee exact for every tie-break seed.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::IndexCode;
use crate::constellation::{approx_eq, PartitionedConstellation, SignalPoint};
use crate::error::{Error, Result};
use crate::gf2::MaskBasis;
use crate::minrank::minrank;
use crate::problem_file::Instance;
use crate::receiver::receiver_dmin_sq;
use crate::report::{sig6, Provenance};

/// Which receivers get priority: those with `eta` strictly below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threshold {
    /// `T = N`, the minrank of the problem.
    #[default]
    Minrank,
    /// `T = l`, the length of the code in use.
    CodeLength,
    Fixed(usize),
}

impl Threshold {
    pub fn resolve(&self, code: &IndexCode) -> Result<usize> {
        Ok(match self {
            Threshold::Minrank => minrank(code.problem())?.length,
            Threshold::CodeLength => code.length(),
            Threshold::Fixed(t) => *t,
        })
    }
}

impl std::str::FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minrank" | "N" => Ok(Threshold::Minrank),
            "length" | "l" => Ok(Threshold::CodeLength),
            other => other
                .parse()
                .map(Threshold::Fixed)
                .map_err(|_| Error::Config(format!("threshold must be minrank, length or an integer, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MappingOptions {
    pub threshold: Threshold,
    /// 0 takes the lowest candidate at every tie; other values pick uniformly at random.
    pub seed: u64,
    /// Zero-based receiver permutation used to order receivers of equal `eta`.
    pub receiver_order: Option<Vec<usize>>,
}

/// Bijection between the `2^l` codewords and the points of a `2^l`-QAM set.
///
/// Codewords are packed with bit `j` holding `y_{j+1}`.
#[derive(Debug, Clone)]
pub struct CodewordMapping {
    assignment: Vec<usize>,
    inverse: Vec<usize>,
    threshold: usize,
    seed: u64,
    receiver_order: Vec<usize>,
    prioritized: usize,
    constellation: PartitionedConstellation,
}

impl CodewordMapping {
    /// Identity labeling: codeword `c` on point `c`.
    pub fn arbitrary(constellation: PartitionedConstellation) -> Self {
        let m = constellation.len();
        Self {
            assignment: (0..m).collect(),
            inverse: (0..m).collect(),
            threshold: 0,
            seed: 0,
            receiver_order: Vec::new(),
            prioritized: 0,
            constellation,
        }
    }

    fn from_assignment(
        assignment: Vec<usize>,
        threshold: usize,
        seed: u64,
        receiver_order: Vec<usize>,
        prioritized: usize,
        constellation: PartitionedConstellation,
    ) -> Self {
        let mut inverse = vec![0; assignment.len()];
        for (c, &p) in assignment.iter().enumerate() {
            inverse[p] = c;
        }
        Self {
            assignment,
            inverse,
            threshold,
            seed,
            receiver_order,
            prioritized,
            constellation,
        }
    }

    pub fn bits(&self) -> usize {
        self.constellation.bits()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn point_of(&self, codeword: u64) -> usize {
        self.assignment[codeword as usize]
    }

    pub fn codeword_at(&self, point: usize) -> u64 {
        self.inverse[point] as u64
    }

    pub fn signal_point(&self, codeword: u64) -> &SignalPoint {
        &self.constellation.points()[self.point_of(codeword)]
    }

    /// Points indexed by codeword.
    pub fn codeword_points(&self) -> Vec<SignalPoint> {
        self.assignment.iter().map(|&p| self.constellation.points()[p]).collect()
    }

    pub fn constellation(&self) -> &PartitionedConstellation {
        &self.constellation
    }

    /// Threshold value in force when the mapping was built.
    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Zero-based receivers in processing order (non-decreasing `eta`).
    pub fn receiver_order(&self) -> &[usize] {
        &self.receiver_order
    }

    /// The first `prioritized_count()` entries of [`Self::receiver_order`] had `eta < T`.
    pub fn prioritized_count(&self) -> usize {
        self.prioritized
    }

    pub fn is_prioritized(&self, receiver: usize) -> bool {
        self.receiver_order[..self.prioritized].contains(&receiver)
    }

    /// Writes `codeword_bits,point_index,I,Q`, codeword bits in order `y_1 .. y_l`.
    pub fn write_csv<W: Write>(&self, mut out: W, provenance: &Provenance) -> Result<()> {
        provenance.write_comments(&mut out)?;
        writeln!(out, "codeword_bits,point_index,I,Q")?;
        for (c, &p) in self.assignment.iter().enumerate() {
            let pt = &self.constellation.points()[p];
            writeln!(out, "{},{},{},{}", codeword_bits(c as u64, self.bits()), p, sig6(pt.i), sig6(pt.q))?;
        }
        Ok(())
    }

    pub fn to_json(&self, instance: &Instance) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry {
            codeword_bits: String,
            point_index: usize,
            i: f64,
            q: f64,
        }
        let entries: Vec<Entry> = self
            .assignment
            .iter()
            .enumerate()
            .map(|(c, &p)| {
                let pt = &self.constellation.points()[p];
                Entry {
                    codeword_bits: codeword_bits(c as u64, self.bits()),
                    point_index: p,
                    i: pt.i,
                    q: pt.q,
                }
            })
            .collect();
        serde_json::json!({
            "problem_hash": instance.hash(),
            "l": self.bits(),
            "threshold": self.threshold,
            "seed": self.seed,
            "receiver_order": self.receiver_order.iter().map(|r| r + 1).collect::<Vec<_>>(),
            "prioritized": self.prioritized,
            "assignment": entries,
        })
    }

    /// Short hash of the assignment table.
    pub fn hash(&self) -> String {
        let text: Vec<String> = self.assignment.iter().map(usize::to_string).collect();
        crate::problem_file::short_hash(text.join(",").as_bytes())
    }
}

/// `y_1 .. y_l` as a bit string.
pub fn codeword_bits(codeword: u64, l: usize) -> String {
    (0..l).map(|j| if codeword >> j & 1 == 1 { '1' } else { '0' }).collect()
}

/// Side-information realization `a` of receiver `i`, packed with bit `t`
/// holding the value of the `t`-th known message (ascending index).
pub fn realization_of(code: &IndexCode, i: usize, x: u64) -> u64 {
    let mut a = 0;
    for (t, &k) in code.problem().receivers()[i].knows().iter().enumerate() {
        a |= (x >> k & 1) << t;
    }
    a
}

/// Contribution of the known messages to the codeword under realization `a`.
fn known_part(code: &IndexCode, i: usize, a: u64) -> u64 {
    let mut y = 0;
    for (t, &k) in code.problem().receivers()[i].knows().iter().enumerate() {
        if a >> t & 1 == 1 {
            y ^= code.row_mask(k);
        }
    }
    y
}

fn unknown_basis(code: &IndexCode, i: usize) -> MaskBasis {
    let unknown = code.unknown_mask(i);
    let mut basis = MaskBasis::default();
    for k in 0..code.problem().messages() {
        if unknown >> k & 1 == 1 {
            basis.insert(code.row_mask(k));
        }
    }
    basis
}

fn span_elements(basis: &MaskBasis) -> Vec<u64> {
    let mut out = vec![0u64];
    for &row in basis.rows() {
        let extra: Vec<u64> = out.iter().map(|v| v ^ row).collect();
        out.extend(extra);
    }
    out
}

/// `C_i(a)`: every codeword `xL` with `x` agreeing with `a` on the known messages, sorted.
pub fn consistent_codewords(code: &IndexCode, i: usize, a: u64) -> Result<Vec<u64>> {
    code.problem().receiver(i)?;
    let base = known_part(code, i, a);
    let mut out: Vec<u64> = span_elements(&unknown_basis(code, i)).into_iter().map(|v| v ^ base).collect();
    out.sort_unstable();
    Ok(out)
}

/// One distinct `C_i(a)`, labelled by the smallest realization producing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    pub realization: u64,
    pub codewords: Vec<u64>,
}

/// Realizations of one receiver grouped by the codeword set they induce.
///
/// Realizations inducing the same set are interchangeable for the mapper,
/// so the pool holds one entry per distinct set and drops it once every
/// codeword in it is placed.
#[derive(Debug, Clone)]
pub struct RealizationPool {
    receiver: usize,
    eta: usize,
    cosets: Vec<Coset>,
}

impl RealizationPool {
    pub fn new(code: &IndexCode, i: usize) -> Result<Self> {
        let eta = code.eta(i)?;
        let unknown = unknown_basis(code, i);
        let known = code.problem().receivers()[i].knows();

        // a -> unknown.reduce(known_part(a)) is linear; walk its image and
        // take the smallest preimage of each image vector.
        let mut image: Vec<(u64, u64)> = Vec::new();
        let mut kernel = KernelBasis::default();
        for (t, &k) in known.iter().enumerate() {
            let mut v = unknown.reduce(code.row_mask(k));
            let mut combo = 1u64 << t;
            for &(iv, ic) in &image {
                if v & iv & iv.wrapping_neg() != 0 {
                    v ^= iv;
                    combo ^= ic;
                }
            }
            if v == 0 {
                kernel.insert(combo);
            } else {
                image.push((v, combo));
            }
        }

        let mut cosets = Vec::with_capacity(1 << image.len());
        for subset in 0u64..(1 << image.len()) {
            let mut a = 0;
            for (b, &(_, ic)) in image.iter().enumerate() {
                if subset >> b & 1 == 1 {
                    a ^= ic;
                }
            }
            let realization = kernel.minimize(a);
            cosets.push(Coset {
                realization,
                codewords: consistent_codewords(code, i, realization)?,
            });
        }
        cosets.sort_by_key(|c| c.realization);
        Ok(Self { receiver: i, eta, cosets })
    }

    pub fn receiver(&self) -> usize {
        self.receiver
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }
}

/// Basis with distinct leading (highest) bits, for minimizing over an affine set.
#[derive(Default)]
struct KernelBasis(Vec<u64>);

impl KernelBasis {
    fn minimize(&self, mut v: u64) -> u64 {
        for &row in &self.0 {
            let lead = 1u64 << (63 - row.leading_zeros());
            if v & lead != 0 {
                v ^= row;
            }
        }
        v
    }

    fn insert(&mut self, v: u64) {
        let v = self.minimize(v);
        if v != 0 {
            self.0.push(v);
            self.0.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
}

struct TieBreak(Option<ChaCha8Rng>);

impl TieBreak {
    fn new(seed: u64) -> Self {
        Self((seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed)))
    }

    /// `items` must be nonempty and in ascending preference order.
    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        match &mut self.0 {
            None => items[0],
            Some(rng) => items[rng.random_range(0..items.len())],
        }
    }
}

struct State {
    point_of: Vec<Option<usize>>,
    codeword_at: Vec<Option<usize>>,
}

impl State {
    fn placed(&self, coset: &Coset) -> usize {
        coset.codewords.iter().filter(|&&c| self.point_of[c as usize].is_some()).count()
    }

    fn assign(&mut self, c: usize, p: usize) {
        self.point_of[c] = Some(p);
        self.codeword_at[p] = Some(c);
    }
}

/// Receivers sorted by non-decreasing `eta`; ties follow `order` (default: index).
fn sorted_receivers(etas: &[usize], order: Option<&[usize]>) -> Result<Vec<usize>> {
    let count = etas.len();
    let base: Vec<usize> = match order {
        None => (0..count).collect(),
        Some(order) => {
            let mut seen = vec![false; count];
            for &r in order {
                if r >= count || std::mem::replace(&mut seen[r], true) {
                    return Err(Error::Config(format!(
                        "receiver order must be a permutation of 1..={count}"
                    )));
                }
            }
            if order.len() != count {
                return Err(Error::Config(format!(
                    "receiver order must be a permutation of 1..={count}"
                )));
            }
            order.to_vec()
        }
    };
    let mut sorted = base;
    sorted.sort_by_key(|&r| etas[r]);
    Ok(sorted)
}

/// Labels every codeword of `code` with a point of `constellation`.
///
/// Requires `rank(L) = l`, all receivers decodable and `2^l` points.
pub fn map_codewords_on(
    code: &IndexCode,
    constellation: &PartitionedConstellation,
    options: &MappingOptions,
) -> Result<CodewordMapping> {
    let l = code.length();
    let m = 1usize << l;
    if constellation.bits() != l {
        return Err(Error::ConstellationSize {
            l,
            expected: m,
            found: constellation.len(),
        });
    }
    code.check_mappable()?;
    let threshold = options.threshold.resolve(code)?;
    let etas: Vec<usize> = (0..code.problem().receivers().len())
        .map(|i| code.eta(i))
        .collect::<Result<_>>()?;
    let order = sorted_receivers(&etas, options.receiver_order.as_deref())?;
    let prioritized: Vec<usize> = order.iter().copied().filter(|&r| etas[r] < threshold).collect();
    let prioritized_count = prioritized.len();

    let mapping = |assignment| {
        CodewordMapping::from_assignment(
            assignment,
            threshold,
            options.seed,
            order.clone(),
            prioritized_count,
            constellation.clone(),
        )
    };
    if prioritized.is_empty() {
        return Ok(mapping((0..m).collect()));
    }

    let mut pools: Vec<RealizationPool> = prioritized
        .iter()
        .map(|&r| RealizationPool::new(code, r))
        .collect::<Result<_>>()?;
    let mut state = State {
        point_of: vec![None; m],
        codeword_at: vec![None; m],
    };
    let mut ties = TieBreak::new(options.seed);
    let points = constellation.points();

    loop {
        for pool in &mut pools {
            pool.cosets.retain(|c| state.placed(c) < c.codewords.len());
        }

        let mut work: Option<(usize, usize)> = None;
        for (r, pool) in pools.iter().enumerate() {
            let overlaps: Vec<usize> = pool.cosets.iter().map(|c| state.placed(c)).collect();
            let best = overlaps.iter().copied().max().unwrap_or(0);
            if best > 0 {
                let candidates: Vec<usize> = (0..overlaps.len()).filter(|&k| overlaps[k] == best).collect();
                work = Some((r, ties.pick(&candidates)));
                break;
            }
        }
        if work.is_none() {
            if let Some(r) = pools.iter().position(|p| !p.is_empty()) {
                let candidates: Vec<usize> = (0..pools[r].cosets.len()).collect();
                work = Some((r, ties.pick(&candidates)));
            }
        }
        let Some((r, k)) = work else { break };

        let coset = &pools[r].cosets[k];
        let level = l - pools[r].eta;
        let in_coset = |p: usize| {
            state.codeword_at[p]
                .is_some_and(|c| coset.codewords.binary_search(&(c as u64)).is_ok())
        };
        let unmapped: Vec<usize> = coset
            .codewords
            .iter()
            .map(|&c| c as usize)
            .filter(|&c| state.point_of[c].is_none())
            .collect();
        let c = ties.pick(&unmapped);
        let placed: Vec<usize> = coset
            .codewords
            .iter()
            .filter_map(|&c| state.point_of[c as usize])
            .collect();

        let subsets = constellation.level(level);
        let counts: Vec<usize> = subsets.iter().map(|s| s.iter().filter(|&&p| in_coset(p)).count()).collect();
        let has_room = |s: &Vec<usize>| s.iter().any(|&p| state.codeword_at[p].is_none());
        let open: Vec<usize> = (0..subsets.len()).filter(|&s| has_room(&subsets[s])).collect();
        let best_open = open.iter().map(|&s| counts[s]).max().expect("a free point remains");

        let mut free: Vec<usize> = if best_open > 0 || placed.is_empty() {
            let candidates: Vec<usize> = open.iter().copied().filter(|&s| counts[s] == best_open).collect();
            let s = ties.pick(&candidates);
            subsets[s].iter().copied().filter(|&p| state.codeword_at[p].is_none()).collect()
        } else {
            // the coset's home subset is full: move up to its nearest ancestor with room
            let best = *counts.iter().max().expect("level is nonempty");
            let mut s = counts.iter().position(|&n| n == best).expect("max exists");
            let mut lvl = level;
            loop {
                lvl -= 1;
                s >>= 1;
                let room: Vec<usize> = constellation.level(lvl)[s]
                    .iter()
                    .copied()
                    .filter(|&p| state.codeword_at[p].is_none())
                    .collect();
                if !room.is_empty() {
                    break room;
                }
            }
        };
        if !placed.is_empty() {
            let spread: Vec<f64> = free
                .iter()
                .map(|&p| {
                    placed
                        .iter()
                        .map(|&q| points[p].distance_sq(&points[q]))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let best = spread.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            free = free
                .iter()
                .zip(&spread)
                .filter(|(_, &d)| approx_eq(d, best))
                .map(|(&p, _)| p)
                .collect();
        }
        let p = ties.pick(&free);
        state.assign(c, p);
    }

    // termination: remaining codewords fill remaining points in ascending order
    let free_points: Vec<usize> = (0..m).filter(|&p| state.codeword_at[p].is_none()).collect();
    let mut free_points = free_points.into_iter();
    for c in 0..m {
        if state.point_of[c].is_none() {
            let p = free_points.next().expect("bijection: counts match");
            state.assign(c, p);
        }
    }
    Ok(mapping(
        state.point_of.into_iter().map(|p| p.expect("every codeword placed")).collect(),
    ))
}

/// [`map_codewords_on`] with the square (even `l`) or coset (odd `l`) QAM of matching size.
pub fn map_codewords(code: &IndexCode, options: &MappingOptions) -> Result<CodewordMapping> {
    let constellation = crate::constellation::build_qam(code.length())?;
    map_codewords_on(code, &constellation, options)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReceiverCheck {
    /// Zero-based receiver index.
    pub receiver: usize,
    pub eta: usize,
    pub prioritized: bool,
    /// Whether this is the first receiver in processing order and prioritized.
    pub top_priority: bool,
    pub dmin_sq: f64,
    pub bracket_lo_sq: f64,
    pub bracket_hi_sq: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MappingReport {
    pub threshold: usize,
    pub receivers: Vec<ReceiverCheck>,
}

impl MappingReport {
    pub fn all_pass(&self) -> bool {
        self.receivers.iter().all(|r| r.pass)
    }

    pub fn dmin_sq(&self) -> Vec<f64> {
        self.receivers.iter().map(|r| r.dmin_sq).collect()
    }
}

/// Squared distance bracket `[Delta_{l-eta-1}^2, Delta_{l-eta}^2]` (both `Delta_0^2` when `eta >= l`).
pub fn distance_bracket_sq(constellation: &PartitionedConstellation, eta: usize) -> (f64, f64) {
    let l = constellation.bits();
    if eta >= l {
        let base = constellation.delta_sq(0);
        return (base, base);
    }
    (constellation.delta_sq((l - eta).saturating_sub(1)), constellation.delta_sq(l - eta))
}

/// Measures every receiver's `d_min^2` under `mapping` and checks it against its bracket.
///
/// The first prioritized receiver must hit the top of its bracket exactly;
/// other prioritized receivers must fall inside it; the rest need only reach `Delta_0^2`.
pub fn verify_mapping(mapping: &CodewordMapping, code: &IndexCode) -> Result<MappingReport> {
    let constellation = mapping.constellation();
    let labeled = mapping.codeword_points();
    let top = mapping.receiver_order().first().copied().filter(|_| mapping.prioritized_count() > 0);
    let receivers = (0..code.problem().receivers().len())
        .map(|i| {
            let eta = code.eta(i)?;
            let dmin_sq = receiver_dmin_sq(&labeled, code, i)?;
            let (lo, hi) = distance_bracket_sq(constellation, eta);
            let prioritized = mapping.is_prioritized(i);
            let top_priority = top == Some(i);
            let pass = if top_priority {
                approx_eq(dmin_sq, hi)
            } else if prioritized {
                (dmin_sq >= lo || approx_eq(dmin_sq, lo)) && (dmin_sq <= hi || approx_eq(dmin_sq, hi))
            } else {
                let base = constellation.delta_sq(0);
                dmin_sq >= base || approx_eq(dmin_sq, base)
            };
            Ok(ReceiverCheck {
                receiver: i,
                eta,
                prioritized,
                top_priority,
                dmin_sq,
                bracket_lo_sq: lo,
                bracket_hi_sq: hi,
                pass,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MappingReport {
        threshold: mapping.threshold(),
        receivers,
    })
}

/// Counts how many times each point is used; all ones for a bijection.
pub fn is_bijection(mapping: &CodewordMapping) -> bool {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for &p in mapping.assignment() {
        *seen.entry(p).or_default() += 1;
    }
    seen.len() == mapping.len() && seen.values().all(|&n| n == 1) && seen.keys().all(|&p| p < mapping.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::build_qam;
    use crate::fixtures;
    use crate::problem::{IndexCodingProblem, Receiver};

    fn dmins(code: &IndexCode, seed: u64) -> Vec<f64> {
        let opts = MappingOptions {
            seed,
            ..Default::default()
        };
        let mapping = map_codewords(code, &opts).unwrap();
        verify_mapping(&mapping, code).unwrap().dmin_sq()
    }

    fn assert_close(found: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(found.len(), expected.len());
        for (f, e) in found.iter().zip(expected) {
            assert!((f - e).abs() <= tol, "found {found:?}, expected {expected:?}");
        }
    }

    #[test]
    fn consistent_codeword_set_sizes() {
        let ex1 = fixtures::example1();
        for a in 0..64 {
            assert_eq!(consistent_codewords(&ex1, 0, a).unwrap().len(), 2);
        }
        assert_eq!(consistent_codewords(&ex1, 6, 0).unwrap().len(), 16);
        let l2 = fixtures::example2_l2();
        assert_eq!(consistent_codewords(&l2, 1, 0).unwrap().len(), 4);
    }

    #[test]
    fn pool_cosets_partition_the_reachable_codewords() {
        let code = fixtures::example1();
        for i in 0..7 {
            let pool = RealizationPool::new(&code, i).unwrap();
            let mut all: Vec<u64> = pool.cosets().iter().flat_map(|c| c.codewords.clone()).collect();
            all.sort_unstable();
            all.dedup();
            let total: usize = pool.cosets().iter().map(|c| c.codewords.len()).sum();
            assert_eq!(all.len(), total, "receiver {i}: cosets overlap");
            // smallest realization: nothing smaller induces the same set
            for coset in pool.cosets() {
                for a in 0..coset.realization {
                    assert_ne!(consistent_codewords(&code, i, a).unwrap(), coset.codewords);
                }
            }
        }
    }

    #[test]
    fn sixteen_qam_example() {
        assert_close(&dmins(&fixtures::example1(), 0), &[12.8, 6.4, 6.4, 1.6, 1.6, 1.6, 1.6], 1e-6);
    }

    #[test]
    fn widening_example() {
        assert_close(&dmins(&fixtures::example2_l1(), 0), &[9.6, 4.8, 2.4, 2.4, 2.4], 5e-3);
        assert_close(&dmins(&fixtures::example2_l2(), 0), &[12.8, 6.4, 1.6, 1.6, 1.6], 5e-3);
        assert_close(
            &dmins(&fixtures::example2_l3(), 0),
            &[15.2381, 3.8095, 0.9524, 0.9524, 0.9524],
            5e-3,
        );
    }

    #[test]
    fn every_seed_gives_valid_bijection() {
        for code in [fixtures::example1(), fixtures::example2_l1(), fixtures::example2_l2(), fixtures::example2_l3()] {
            for seed in 0..12 {
                let mapping = map_codewords(&code, &MappingOptions { seed, ..Default::default() }).unwrap();
                assert!(is_bijection(&mapping));
                let report = verify_mapping(&mapping, &code).unwrap();
                assert!(report.all_pass(), "seed {seed}: {report:?}");
            }
        }
    }

    #[test]
    fn same_seed_same_mapping() {
        let code = fixtures::example2_l3();
        for seed in [0, 3, 99] {
            let opts = MappingOptions { seed, ..Default::default() };
            let a = map_codewords(&code, &opts).unwrap();
            let b = map_codewords(&code, &opts).unwrap();
            assert_eq!(a.assignment(), b.assignment());
        }
    }

    #[test]
    fn top_receiver_cosets_sit_in_one_subset() {
        for code in [fixtures::example1(), fixtures::example2_l1(), fixtures::example2_l2(), fixtures::example2_l3()] {
            for seed in 0..8 {
                let mapping = map_codewords(&code, &MappingOptions { seed, ..Default::default() }).unwrap();
                let top = mapping.receiver_order()[0];
                let eta = code.eta(top).unwrap();
                let level = code.length() - eta;
                for coset in RealizationPool::new(&code, top).unwrap().cosets() {
                    let subsets: Vec<usize> = coset
                        .codewords
                        .iter()
                        .map(|&c| mapping.constellation().subset_of(level, mapping.point_of(c)))
                        .collect();
                    assert!(subsets.iter().all(|&s| s == subsets[0]), "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn no_side_information_gives_identity_mapping() {
        let p = IndexCodingProblem::new(3, (0..3).map(|i| Receiver::new([i], [])).collect()).unwrap();
        let code = IndexCode::uncoded(p);
        let mapping = map_codewords(&code, &MappingOptions::default()).unwrap();
        assert_eq!(mapping.assignment(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(mapping.prioritized_count(), 0);
        let report = verify_mapping(&mapping, &code).unwrap();
        assert!(report.all_pass());
        assert_close(&report.dmin_sq(), &[2.4; 3], 1e-9);
    }

    #[test]
    fn equal_eta_receivers_match_on_examples() {
        // receivers with equal eta and nested known-bit sets
        for code in [fixtures::example1(), fixtures::example2_l2()] {
            let report = verify_mapping(&map_codewords(&code, &MappingOptions::default()).unwrap(), &code).unwrap();
            let analyses = code.analyze_all();
            for a in &analyses {
                for b in &analyses {
                    let nested = a.known_bits.iter().all(|j| b.known_bits.contains(j));
                    if a.eta == b.eta && nested {
                        assert!(approx_eq(report.receivers[a.receiver].dmin_sq, report.receivers[b.receiver].dmin_sq));
                    }
                }
            }
        }
    }

    #[test]
    fn receiver_order_breaks_eta_ties_only() {
        let code = fixtures::example1();
        let opts = MappingOptions {
            receiver_order: Some(vec![6, 5, 4, 3, 2, 1, 0]),
            ..Default::default()
        };
        let mapping = map_codewords(&code, &opts).unwrap();
        assert_eq!(mapping.receiver_order(), &[0, 2, 1, 6, 5, 4, 3]);
        assert!(verify_mapping(&mapping, &code).unwrap().all_pass());
        let bad = MappingOptions {
            receiver_order: Some(vec![0, 0, 1, 2, 3, 4, 5]),
            ..Default::default()
        };
        assert!(matches!(map_codewords(&code, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn code_length_threshold() {
        let code = fixtures::example2_l3();
        let mapping = map_codewords(&code, &MappingOptions { threshold: Threshold::CodeLength, ..Default::default() }).unwrap();
        assert_eq!(mapping.threshold(), 5);
        assert_eq!(mapping.prioritized_count(), 4);
        assert!(is_bijection(&mapping));
    }

    #[test]
    fn preconditions() {
        let code = fixtures::example1();
        assert!(matches!(
            map_codewords_on(&code, &build_qam(3).unwrap(), &MappingOptions::default()),
            Err(Error::ConstellationSize { .. })
        ));
        let p = fixtures::example2_problem();
        let weak = IndexCode::new(p, crate::gf2::BitMatrix::from_rows(&[[1u8, 0], [1, 0], [0, 1], [0, 1], [1, 1]]).unwrap()).unwrap();
        assert!(map_codewords(&weak, &MappingOptions::default()).is_err());
    }

    #[test]
    fn csv_layout() {
        let code = fixtures::example1();
        let mapping = map_codewords(&code, &MappingOptions::default()).unwrap();
        let mut out = Vec::new();
        mapping.write_csv(&mut out, &Provenance::new()).unwrap();
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "codeword_bits,point_index,I,Q");
        assert_eq!(rows.len(), 17);
        assert!(rows[2].starts_with("1000,"));
        assert_eq!(codeword_bits(0b0110, 4), "0110");
    }
}
