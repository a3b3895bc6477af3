//! What each receiver sees: the points left after applying side information,
//! their distances, and nearest-point decoding of the wanted messages.
//!
//! Functions here take `labeled: &[SignalPoint]`, the transmitted point for
//! every codeword (`labeled[c]` for codeword `c`). A QAM mapping gives this via
//! [`CodewordMapping::codeword_points`](crate::mapper::CodewordMapping::codeword_points);
//! the PSK baseline is `build_psk(l)` as is.

use std::io::Write;

use serde::Serialize;

use crate::code::IndexCode;
use crate::constellation::{approx_eq, PartitionedConstellation, SignalPoint};
use crate::error::{Error, Result};
use crate::mapper::{consistent_codewords, distance_bracket_sq, RealizationPool};
use crate::report::{sig6, Provenance};

fn parity(v: u64) -> u64 {
    (v.count_ones() & 1) as u64
}

/// Linear recovery of one receiver's wanted messages from `y` and its side information.
///
/// For wanted message `w`, `x_w = <alpha, y> + <beta, x>` where `beta` only
/// touches known messages. `alpha` has minimum weight among valid choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WantedDecoder {
    alpha: Vec<u64>,
    beta: Vec<u64>,
}

impl WantedDecoder {
    pub fn new(code: &IndexCode, i: usize) -> Result<Self> {
        let rx = code.problem().receiver(i)?;
        let unknown = code.unknown_mask(i);
        let known = rx.knows_mask();
        let l = code.length();
        let columns: Vec<u64> = (0..l).map(|j| code.matrix().column_mask(j)).collect();

        // eliminate the unknown parts of the columns, tracking combinations
        let mut pivots: Vec<(u64, u64)> = Vec::new();
        let mut kernel: Vec<u64> = Vec::new();
        for (j, &col) in columns.iter().enumerate() {
            let mut v = col & unknown;
            let mut combo = 1u64 << j;
            for &(pv, pc) in &pivots {
                if v & pv & pv.wrapping_neg() != 0 {
                    v ^= pv;
                    combo ^= pc;
                }
            }
            if v == 0 {
                kernel.push(combo);
            } else {
                pivots.push((v, combo));
            }
        }

        let mut alpha = Vec::with_capacity(rx.wants().len());
        let mut beta = Vec::with_capacity(rx.wants().len());
        for &w in rx.wants() {
            let mut v = 1u64 << w;
            let mut combo = 0u64;
            for &(pv, pc) in &pivots {
                if v & pv & pv.wrapping_neg() != 0 {
                    v ^= pv;
                    combo ^= pc;
                }
            }
            if v != 0 {
                return Err(Error::NotDecodable { receiver: i + 1 });
            }
            let best = (0u64..1 << kernel.len())
                .map(|s| {
                    kernel
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| s >> b & 1 == 1)
                        .fold(combo, |acc, (_, &k)| acc ^ k)
                })
                .min_by_key(|a| (a.count_ones(), *a))
                .expect("at least the empty combination");
            let image = columns
                .iter()
                .enumerate()
                .filter(|(j, _)| best >> j & 1 == 1)
                .fold(0u64, |acc, (_, &c)| acc ^ c);
            alpha.push(best);
            beta.push(image & known);
        }
        Ok(Self { alpha, beta })
    }

    /// Codeword bits used for each wanted message.
    pub fn alpha(&self) -> &[u64] {
        &self.alpha
    }

    /// Known messages used for each wanted message.
    pub fn beta(&self) -> &[u64] {
        &self.beta
    }

    /// Wanted values packed with bit `t` holding the `t`-th wanted message.
    pub fn decode(&self, y: u64, x: u64) -> u64 {
        self.alpha
            .iter()
            .zip(&self.beta)
            .enumerate()
            .fold(0, |acc, (t, (&a, &b))| acc | (parity(a & y) ^ parity(b & x)) << t)
    }
}

/// Wanted values of a message vector, bit `t` holding the `t`-th wanted message.
pub fn wanted_label(code: &IndexCode, i: usize, x: u64) -> u64 {
    code.problem().receivers()[i]
        .wants()
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &w)| acc | (x >> w & 1) << t)
}

/// Known messages of receiver `i` placed at their positions, from a packed realization.
pub fn side_information(code: &IndexCode, i: usize, realization: u64) -> u64 {
    code.problem().receivers()[i]
        .knows()
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &k)| acc | (realization >> t & 1) << k)
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveConstellation {
    pub receiver: usize,
    pub realization: u64,
    pub codewords: Vec<u64>,
    pub points: Vec<SignalPoint>,
    pub labels: Vec<u64>,
    /// Smallest squared distance between points with different labels; infinite if all labels agree.
    pub dmin_sq: f64,
}

impl EffectiveConstellation {
    /// Squared distances between every pair with different labels.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for a in 0..self.points.len() {
            for b in a + 1..self.points.len() {
                if self.labels[a] != self.labels[b] {
                    out.push(self.points[a].distance_sq(&self.points[b]));
                }
            }
        }
        out
    }
}

/// Points receiver `i` can see under side-information realization `a`, with wanted labels.
pub fn effective_constellation(
    labeled: &[SignalPoint],
    code: &IndexCode,
    i: usize,
    realization: u64,
) -> Result<EffectiveConstellation> {
    let decoder = WantedDecoder::new(code, i)?;
    effective_with(&decoder, labeled, code, i, realization)
}

fn effective_with(
    decoder: &WantedDecoder,
    labeled: &[SignalPoint],
    code: &IndexCode,
    i: usize,
    realization: u64,
) -> Result<EffectiveConstellation> {
    check_labeling(labeled, code)?;
    let x_known = side_information(code, i, realization);
    let codewords = consistent_codewords(code, i, realization)?;
    let points: Vec<SignalPoint> = codewords.iter().map(|&c| labeled[c as usize]).collect();
    let labels: Vec<u64> = codewords.iter().map(|&c| decoder.decode(c, x_known)).collect();
    let mut dmin_sq = f64::INFINITY;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if labels[a] != labels[b] {
                dmin_sq = dmin_sq.min(points[a].distance_sq(&points[b]));
            }
        }
    }
    Ok(EffectiveConstellation {
        receiver: i,
        realization,
        codewords,
        points,
        labels,
        dmin_sq,
    })
}

fn check_labeling(labeled: &[SignalPoint], code: &IndexCode) -> Result<()> {
    let expected = 1usize << code.length();
    if labeled.len() != expected {
        return Err(Error::ConstellationSize {
            l: code.length(),
            expected,
            found: labeled.len(),
        });
    }
    Ok(())
}

/// Histogram bin: a squared distance and how many differing-label pairs sit at it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumBin {
    pub distance_sq: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReceiverDistances {
    pub receiver: usize,
    pub eta: usize,
    /// Worst case over realizations.
    pub dmin_sq: f64,
    /// `(smallest realization, dmin_sq)` for every distinct codeword set the receiver can face.
    pub per_realization: Vec<(u64, f64)>,
    /// Differing-label pair distances pooled over the distinct codeword sets.
    pub spectrum: Vec<SpectrumBin>,
}

fn histogram(mut values: Vec<f64>) -> Vec<SpectrumBin> {
    values.sort_by(f64::total_cmp);
    let mut bins: Vec<SpectrumBin> = Vec::new();
    for v in values {
        match bins.last_mut() {
            Some(bin) if approx_eq(bin.distance_sq, v) => bin.count += 1,
            _ => bins.push(SpectrumBin {
                distance_sq: v,
                count: 1,
            }),
        }
    }
    bins
}

/// Distance profile of receiver `i`: per-realization minima, worst case and spectrum.
pub fn receiver_distances(labeled: &[SignalPoint], code: &IndexCode, i: usize) -> Result<ReceiverDistances> {
    let decoder = WantedDecoder::new(code, i)?;
    let pool = RealizationPool::new(code, i)?;
    let mut per_realization = Vec::with_capacity(pool.cosets().len());
    let mut pairs = Vec::new();
    for coset in pool.cosets() {
        let eff = effective_with(&decoder, labeled, code, i, coset.realization)?;
        per_realization.push((coset.realization, eff.dmin_sq));
        pairs.extend(eff.spectrum());
    }
    let dmin_sq = per_realization.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(ReceiverDistances {
        receiver: i,
        eta: pool.eta(),
        dmin_sq,
        per_realization,
        spectrum: histogram(pairs),
    })
}

/// Worst-case `d_min^2` of receiver `i` over all side-information realizations.
pub fn receiver_dmin_sq(labeled: &[SignalPoint], code: &IndexCode, i: usize) -> Result<f64> {
    Ok(receiver_distances(labeled, code, i)?.dmin_sq)
}

/// Label of the nearest effective point; ties go to the lowest point index.
pub fn ml_decode(effective: &EffectiveConstellation, sample: (f64, f64)) -> u64 {
    let mut best = (f64::INFINITY, usize::MAX, 0u64);
    for (p, &label) in effective.points.iter().zip(&effective.labels) {
        let d = p.distance_sq_to(sample.0, sample.1);
        if d < best.0 || (d == best.0 && p.index < best.1) {
            best = (d, p.index, label);
        }
    }
    best.2
}

/// Squared distance of the binary baseline: each codeword bit sent as
/// `+-1`, so codewords at Hamming distance `h` sit `4h` apart.
pub fn binary_receiver_dmin_sq(code: &IndexCode, i: usize) -> Result<f64> {
    let decoder = WantedDecoder::new(code, i)?;
    // every coset is a translate of the same span and the labels shift by a
    // constant, so the realization a = 0 is representative
    let codewords = consistent_codewords(code, i, 0)?;
    let mut best = u32::MAX;
    for (a, &ca) in codewords.iter().enumerate() {
        for &cb in &codewords[a + 1..] {
            if decoder.decode(ca, 0) != decoder.decode(cb, 0) {
                best = best.min((ca ^ cb).count_ones());
            }
        }
    }
    Ok(if best == u32::MAX { f64::INFINITY } else { 4.0 * best as f64 })
}

/// One distance-report row per receiver.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceRow {
    pub receiver: usize,
    pub eta: usize,
    pub dmin_sq: f64,
    pub bracket_lo_sq: f64,
    pub bracket_hi_sq: f64,
    pub spectrum: Vec<SpectrumBin>,
}

pub fn distance_rows(
    labeled: &[SignalPoint],
    constellation: &PartitionedConstellation,
    code: &IndexCode,
) -> Result<Vec<DistanceRow>> {
    (0..code.problem().receivers().len())
        .map(|i| {
            let d = receiver_distances(labeled, code, i)?;
            let (lo, hi) = distance_bracket_sq(constellation, d.eta);
            Ok(DistanceRow {
                receiver: i,
                eta: d.eta,
                dmin_sq: d.dmin_sq,
                bracket_lo_sq: lo,
                bracket_hi_sq: hi,
                spectrum: d.spectrum,
            })
        })
        .collect()
}

/// `d2:count` pairs joined by `;`.
pub fn format_spectrum(spectrum: &[SpectrumBin]) -> String {
    spectrum
        .iter()
        .map(|b| format!("{}:{}", sig6(b.distance_sq), b.count))
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes `receiver,eta,dmin_sq,bracket_lo_sq,bracket_hi_sq,spectrum_histogram` (receivers one-based).
pub fn write_distance_report<W: Write>(rows: &[DistanceRow], mut out: W, provenance: &Provenance) -> Result<()> {
    provenance.write_comments(&mut out)?;
    writeln!(out, "receiver,eta,dmin_sq,bracket_lo_sq,bracket_hi_sq,spectrum_histogram")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.receiver + 1,
            r.eta,
            sig6(r.dmin_sq),
            sig6(r.bracket_lo_sq),
            sig6(r.bracket_hi_sq),
            format_spectrum(&r.spectrum)
        )?;
    }
    Ok(())
}
