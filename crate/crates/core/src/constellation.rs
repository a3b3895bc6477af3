//! Energy-normalized QAM and PSK signal sets, Ungerboeck set partitioning,
//! and the closed-form minimum distance of the QAM sets used here.
//!
//! Every constellation carrying `l` bits has average symbol energy `l`, the
//! same total energy as `l` unit-energy binary transmissions.
//!
//! QAM points are indexed row-major over the square grid: rows by increasing
//! `Q`, columns by increasing `I`, so point 0 is the most negative corner.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{sig6, Provenance};

pub const MIN_QAM_BITS: usize = 2;
pub const MAX_QAM_BITS: usize = 12;
pub const MAX_PSK_BITS: usize = 16;

/// Relative tolerance for comparing squared distances.
pub const DISTANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalPoint {
    pub index: usize,
    pub i: f64,
    pub q: f64,
}

impl SignalPoint {
    pub fn new(index: usize, i: f64, q: f64) -> Self {
        Self { index, i, q }
    }

    pub fn distance_sq(&self, other: &SignalPoint) -> f64 {
        let (di, dq) = (self.i - other.i, self.q - other.q);
        di * di + dq * dq
    }

    pub fn distance_sq_to(&self, i: f64, q: f64) -> f64 {
        let (di, dq) = (self.i - i, self.q - q);
        di * di + dq * dq
    }

    pub fn energy(&self) -> f64 {
        self.i * self.i + self.q * self.q
    }
}

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= DISTANCE_TOLERANCE * a.abs().max(b.abs())
}

/// Smallest pairwise squared distance; infinite for fewer than two points.
pub fn min_distance_sq(points: &[SignalPoint]) -> f64 {
    let mut best = f64::INFINITY;
    for (k, a) in points.iter().enumerate() {
        for b in &points[k + 1..] {
            best = best.min(a.distance_sq(b));
        }
    }
    best
}

pub fn mean_energy(points: &[SignalPoint]) -> f64 {
    points.iter().map(SignalPoint::energy).sum::<f64>() / points.len() as f64
}

/// A `2^l`-point QAM set with its Ungerboeck partition tree.
///
/// Level `k` (`0 <= k < l`) holds `2^k` subsets of `2^(l-k)` points. Subset `s`
/// at level `k` splits into subsets `2s` and `2s + 1` at level `k + 1`; the
/// first child always holds the lower-indexed point of the pair being split.
#[derive(Debug, Clone)]
pub struct PartitionedConstellation {
    l: usize,
    points: Vec<SignalPoint>,
    levels: Vec<Vec<Vec<usize>>>,
    delta_sq: Vec<f64>,
    // subset choices down the tree, first split in the most significant of l-1 bits
    paths: Vec<usize>,
}

impl PartitionedConstellation {
    /// Bits per symbol.
    pub fn bits(&self) -> usize {
        self.l
    }

    pub fn points(&self) -> &[SignalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Subsets at level `k`, each a sorted list of point indices.
    pub fn level(&self, k: usize) -> &[Vec<usize>] {
        &self.levels[k]
    }

    /// `Delta_k^2`, the smallest squared distance inside any level-`k` subset.
    pub fn delta_sq(&self, k: usize) -> f64 {
        self.delta_sq[k]
    }

    pub fn deltas_sq(&self) -> &[f64] {
        &self.delta_sq
    }

    /// Index of the level-`k` subset containing point `p`.
    pub fn subset_of(&self, k: usize, p: usize) -> usize {
        self.paths[p] >> (self.l - 1 - k)
    }

    /// Subset choices from the root down to the level `l - 1` subset holding `p`.
    pub fn level_path(&self, p: usize) -> String {
        let width = self.l - 1;
        format!("{:0width$b}", self.paths[p], width = width)
    }

    pub fn mean_energy(&self) -> f64 {
        mean_energy(&self.points)
    }

    /// Writes `index,I,Q,level-path` rows.
    pub fn write_csv<W: Write>(&self, mut out: W, provenance: &Provenance) -> Result<()> {
        provenance.write_comments(&mut out)?;
        writeln!(out, "index,I,Q,level-path")?;
        for p in &self.points {
            writeln!(out, "{},{},{},{}", p.index, sig6(p.i), sig6(p.q), self.level_path(p.index))?;
        }
        Ok(())
    }
}

fn square_grid(side: usize, energy: f64) -> Vec<SignalPoint> {
    let level = |k: usize| 2.0 * k as f64 - (side as f64 - 1.0);
    let mut points: Vec<SignalPoint> = (0..side * side)
        .map(|idx| SignalPoint::new(idx, level(idx % side), level(idx / side)))
        .collect();
    let scale = (energy / mean_energy(&points)).sqrt();
    for p in &mut points {
        p.i *= scale;
        p.q *= scale;
    }
    points
}

/// Builds the `2^l`-QAM set with average energy `l` and its partition tree.
///
/// Even `l` uses the square grid directly. Odd `l` builds the square
/// `2^(l+1)`-QAM with average energy `l`, splits it once and keeps the coset
/// containing the most negative corner point.
pub fn build_qam(l: usize) -> Result<PartitionedConstellation> {
    if !(MIN_QAM_BITS..=MAX_QAM_BITS).contains(&l) {
        return Err(Error::ConstellationOrder {
            l,
            min: MIN_QAM_BITS,
            max: MAX_QAM_BITS,
        });
    }
    let points = if l.is_multiple_of(2) {
        square_grid(1 << (l / 2), l as f64)
    } else {
        let (kept, _) = ungerboeck_split(&square_grid(1 << l.div_ceil(2), l as f64))?;
        kept.iter()
            .enumerate()
            .map(|(idx, p)| SignalPoint::new(idx, p.i, p.q))
            .collect()
    };
    partition(l, points)
}

fn partition(l: usize, points: Vec<SignalPoint>) -> Result<PartitionedConstellation> {
    let mut levels: Vec<Vec<Vec<usize>>> = vec![vec![(0..points.len()).collect()]];
    for _ in 1..l {
        let parent = levels.last().expect("root level exists");
        let mut next = Vec::with_capacity(parent.len() * 2);
        for subset in parent {
            let members: Vec<SignalPoint> = subset.iter().map(|&p| points[p]).collect();
            let (a, b) = ungerboeck_split(&members)?;
            next.push(a.iter().map(|p| p.index).collect());
            next.push(b.iter().map(|p| p.index).collect());
        }
        levels.push(next);
    }

    let mut paths = vec![0usize; points.len()];
    for (s, subset) in levels[l - 1].iter().enumerate() {
        for &p in subset {
            paths[p] = s;
        }
    }
    let delta_sq = levels
        .iter()
        .map(|subsets| {
            subsets
                .iter()
                .map(|s| min_distance_sq(&s.iter().map(|&p| points[p]).collect::<Vec<_>>()))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(PartitionedConstellation {
        l,
        points,
        levels,
        delta_sq,
        paths,
    })
}

/// One Ungerboeck split: two-colors the graph joining points at exactly the
/// subset's minimum distance.
///
/// Returns `(A, B)` with `A` holding the lowest-indexed input point, each
/// sorted by index. Fails unless the graph is connected and bipartite, the
/// classes have equal size and (for more than two points) each class has
/// twice the parent's squared minimum distance.
pub fn ungerboeck_split(points: &[SignalPoint]) -> Result<(Vec<SignalPoint>, Vec<SignalPoint>)> {
    if points.len() < 2 || !points.len().is_multiple_of(2) {
        return Err(Error::Partition(format!(
            "cannot split {} points into two equal halves",
            points.len()
        )));
    }
    let dmin = min_distance_sq(points);
    let size = points.len();
    let mut adjacency = vec![Vec::new(); size];
    for a in 0..size {
        for b in a + 1..size {
            if approx_eq(points[a].distance_sq(&points[b]), dmin) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }

    let start = (0..size)
        .min_by_key(|&k| points[k].index)
        .expect("at least two points");
    let mut color: Vec<Option<bool>> = vec![None; size];
    color[start] = Some(false);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        let here = color[a].expect("queued points are colored");
        for &b in &adjacency[a] {
            match color[b] {
                None => {
                    color[b] = Some(!here);
                    queue.push_back(b);
                }
                Some(c) if c == here => {
                    return Err(Error::Partition(
                        "minimum-distance graph is not bipartite".into(),
                    ))
                }
                Some(_) => {}
            }
        }
    }
    if color.iter().any(Option::is_none) {
        return Err(Error::Partition(
            "minimum-distance graph is disconnected; coloring is ambiguous".into(),
        ));
    }

    let mut a: Vec<SignalPoint> = Vec::with_capacity(size / 2);
    let mut b: Vec<SignalPoint> = Vec::with_capacity(size / 2);
    for (k, p) in points.iter().enumerate() {
        if color[k] == Some(false) {
            a.push(*p);
        } else {
            b.push(*p);
        }
    }
    if a.len() != b.len() {
        return Err(Error::Partition(format!(
            "unequal classes of {} and {} points",
            a.len(),
            b.len()
        )));
    }
    if size > 2 {
        for half in [&a, &b] {
            if !approx_eq(min_distance_sq(half), 2.0 * dmin) {
                return Err(Error::Partition(
                    "split does not double the squared minimum distance".into(),
                ));
            }
        }
    }
    a.sort_by_key(|p| p.index);
    b.sort_by_key(|p| p.index);
    Ok((a, b))
}

/// Closed-form minimum distance (not squared) of the `2^l`-QAM built by [`build_qam`].
pub fn dmin_formula(l: usize) -> f64 {
    let lf = l as f64;
    if l.is_multiple_of(2) {
        2.0 * (1.5 * lf / ((1u64 << l) as f64 - 1.0)).sqrt()
    } else {
        2.0 * 2f64.sqrt() * (1.5 * lf / ((1u64 << (l + 1)) as f64 - 1.0)).sqrt()
    }
}

/// `2^l` points evenly spaced on the circle of squared radius `l`, point `k` at angle `2 pi k / 2^l`.
pub fn build_psk(l: usize) -> Result<Vec<SignalPoint>> {
    if !(MIN_QAM_BITS..=MAX_PSK_BITS).contains(&l) {
        return Err(Error::ConstellationOrder {
            l,
            min: MIN_QAM_BITS,
            max: MAX_PSK_BITS,
        });
    }
    let m = 1usize << l;
    let radius = (l as f64).sqrt();
    Ok((0..m)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / m as f64;
            SignalPoint::new(k, radius * angle.cos(), radius * angle.sin())
        })
        .collect())
}

/// Squared minimum distance of [`build_psk`]: `4 l sin^2(pi / 2^l)`.
pub fn psk_dmin_sq(l: usize) -> f64 {
    let s = (PI / (1u64 << l) as f64).sin();
    4.0 * l as f64 * s * s
}
