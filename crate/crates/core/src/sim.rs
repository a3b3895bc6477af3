//! Monte Carlo error rates of the wanted messages over a complex AWGN broadcast channel.
//!
//! Energy convention: a QAM or PSK symbol carries `l` bits with average energy
//! `E_s = l`; the binary scheme sends the `l` codeword bits as unit-energy
//! `+-1` symbols, so both spend the same total energy. The SNR axis is
//! `E_s/N_0` in dB and every real dimension gets noise of variance `N_0 / 2`.
//! Each receiver sees its own independent noise.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::code::IndexCode;
use crate::constellation::{build_psk, SignalPoint};
use crate::error::{Error, Result};
use crate::gf2::MaskBasis;
use crate::mapper::{CodewordMapping, RealizationPool};
use crate::receiver::{effective_constellation, wanted_label, WantedDecoder};
use crate::report::{sig6, Provenance};

pub const ENERGY_CONVENTION: &str =
    "Es = l (QAM/PSK symbol energy, l unit-energy binary symbols); snr_db = Es/N0; noise variance N0/2 per real dimension";

pub const DEFAULT_LANES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Scheme {
    #[serde(rename = "qam-mapped")]
    QamMapped,
    #[serde(rename = "psk-arbitrary")]
    PskArbitrary,
    #[serde(rename = "binary")]
    Binary,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::QamMapped, Scheme::PskArbitrary, Scheme::Binary];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::QamMapped => "qam-mapped",
            Scheme::PskArbitrary => "psk-arbitrary",
            Scheme::Binary => "binary",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme {s:?}; expected qam-mapped, psk-arbitrary or binary")))
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scheme: Scheme,
    /// `E_s/N_0` values in dB.
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Independent RNG streams; results depend on this, not on the thread count.
    pub lanes: usize,
}

impl SimConfig {
    pub fn new(scheme: Scheme, snr_db: Vec<f64>, trials: u64, seed: u64) -> Self {
        Self {
            scheme,
            snr_db,
            trials,
            seed,
            lanes: DEFAULT_LANES,
        }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("at least one SNR point is required".into()));
        }
        if self.lanes == 0 {
            return Err(Error::Config("lanes must be at least 1".into()));
        }
        if let Some(bad) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SNR value {bad} is not finite")));
        }
        Ok(())
    }
}

/// Inclusive range `start, start + step, ..` up to `stop`.
pub fn snr_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::Config("SNR range bounds must be finite".into()));
    }
    if stop < start {
        return Err(Error::Config(format!("--snr-stop {stop} is below --snr-start {start}")));
    }
    if step <= 0.0 {
        if stop == start {
            return Ok(vec![start]);
        }
        return Err(Error::Config("--snr-step must be positive".into()));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// `N_0 = l / 10^(snr_db / 10)`.
pub fn n0_from_snr_db(l: usize, snr_db: f64) -> f64 {
    l as f64 / 10f64.powf(snr_db / 10.0)
}

pub fn snr_db_from_n0(l: usize, n0: f64) -> f64 {
    10.0 * (l as f64 / n0).log10()
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub scheme: Scheme,
    /// Zero-based receiver index.
    pub receiver: usize,
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
}

impl SimRow {
    pub fn error_rate(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }

    /// `sqrt(p (1 - p) / trials)`.
    pub fn stderr(&self) -> f64 {
        let p = self.error_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub scheme: Scheme,
    pub seed: u64,
    /// Ordered by SNR point, then receiver.
    pub rows: Vec<SimRow>,
}

impl SimResult {
    pub fn row(&self, receiver: usize, snr_index: usize, receivers: usize) -> &SimRow {
        &self.rows[snr_index * receivers + receiver]
    }
}

/// Per-receiver detector over the receiver's possible points.
struct PointDetector {
    unknown: MaskBasis,
    known_mask: u64,
    decoder: WantedDecoder,
    // reduced codeword -> (codeword, point) pairs of its coset
    cosets: Vec<Vec<(u64, SignalPoint)>>,
}

impl PointDetector {
    fn new(labeled: &[SignalPoint], code: &IndexCode, i: usize) -> Result<Self> {
        let mut unknown = MaskBasis::default();
        let unknown_messages = code.unknown_mask(i);
        for k in 0..code.problem().messages() {
            if unknown_messages >> k & 1 == 1 {
                unknown.insert(code.row_mask(k));
            }
        }
        let mut cosets = vec![Vec::new(); 1 << code.length()];
        for coset in RealizationPool::new(code, i)?.cosets() {
            let eff = effective_constellation(labeled, code, i, coset.realization)?;
            let key = unknown.reduce(coset.codewords[0]) as usize;
            cosets[key] = eff.codewords.iter().copied().zip(eff.points.iter().copied()).collect();
        }
        Ok(Self {
            unknown,
            known_mask: code.problem().receivers()[i].knows_mask(),
            decoder: WantedDecoder::new(code, i)?,
            cosets,
        })
    }

    /// Wanted values decoded from a received sample, given true codeword `y` and messages `x`.
    fn detect(&self, y: u64, x: u64, sample: (f64, f64)) -> u64 {
        let candidates = &self.cosets[self.unknown.reduce(y) as usize];
        let mut best = (f64::INFINITY, usize::MAX, 0u64);
        for &(c, p) in candidates {
            let d = p.distance_sq_to(sample.0, sample.1);
            if d < best.0 || (d == best.0 && p.index < best.1) {
                best = (d, p.index, c);
            }
        }
        self.decoder.decode(best.2, x & self.known_mask)
    }
}

struct BitDetector {
    known_bits: u64,
    known_mask: u64,
    decoder: WantedDecoder,
}

impl BitDetector {
    fn new(code: &IndexCode, i: usize) -> Result<Self> {
        Ok(Self {
            known_bits: code.known_transmissions(i)?.iter().fold(0, |acc, &j| acc | 1 << j),
            known_mask: code.problem().receivers()[i].knows_mask(),
            decoder: WantedDecoder::new(code, i)?,
        })
    }

    /// Bitwise sign decisions on unknown bits; known bits are taken from the side information.
    fn detect(&self, y: u64, x: u64, received: &[f64]) -> u64 {
        let mut hard = y & self.known_bits;
        for (j, &r) in received.iter().enumerate() {
            if self.known_bits >> j & 1 == 0 && r < 0.0 {
                hard |= 1 << j;
            }
        }
        self.decoder.decode(hard, x & self.known_mask)
    }
}

enum Transmitter {
    Points {
        labeled: Vec<SignalPoint>,
        detectors: Vec<PointDetector>,
    },
    Bits {
        l: usize,
        detectors: Vec<BitDetector>,
    },
}

impl Transmitter {
    fn new(code: &IndexCode, scheme: Scheme, mapping: Option<&CodewordMapping>) -> Result<Self> {
        let receivers = code.problem().receivers().len();
        let labeled = match (scheme, mapping) {
            (Scheme::QamMapped, Some(m)) => {
                if m.bits() != code.length() {
                    return Err(Error::SchemeMismatch(format!(
                        "mapping carries {} bits but the code has length {}",
                        m.bits(),
                        code.length()
                    )));
                }
                Some(m.codeword_points())
            }
            (Scheme::QamMapped, None) => {
                return Err(Error::SchemeMismatch("qam-mapped needs a codeword mapping".into()))
            }
            (_, Some(_)) => {
                return Err(Error::SchemeMismatch(format!(
                    "{scheme} uses a fixed labeling and takes no mapping"
                )))
            }
            (Scheme::PskArbitrary, None) => Some(build_psk(code.length())?),
            (Scheme::Binary, None) => None,
        };
        code.check_mappable()?;
        Ok(match labeled {
            Some(labeled) => {
                let detectors = (0..receivers)
                    .map(|i| PointDetector::new(&labeled, code, i))
                    .collect::<Result<_>>()?;
                Transmitter::Points { labeled, detectors }
            }
            None => Transmitter::Bits {
                l: code.length(),
                detectors: (0..receivers).map(|i| BitDetector::new(code, i)).collect::<Result<_>>()?,
            },
        })
    }

    /// Adds one error per receiver whose wanted values come out wrong.
    fn trial<R: Rng>(&self, code: &IndexCode, x: u64, sigma: f64, rng: &mut R, errors: &mut [u64], buf: &mut Vec<f64>) {
        let y = code.encode(x);
        match self {
            Transmitter::Points { labeled, detectors } => {
                let p = labeled[y as usize];
                for (i, det) in detectors.iter().enumerate() {
                    let ni: f64 = rng.sample(StandardNormal);
                    let nq: f64 = rng.sample(StandardNormal);
                    let got = det.detect(y, x, (p.i + sigma * ni, p.q + sigma * nq));
                    if got != wanted_label(code, i, x) {
                        errors[i] += 1;
                    }
                }
            }
            Transmitter::Bits { l, detectors } => {
                for (i, det) in detectors.iter().enumerate() {
                    buf.clear();
                    for j in 0..*l {
                        let s = if y >> j & 1 == 1 { -1.0 } else { 1.0 };
                        let n: f64 = rng.sample(StandardNormal);
                        buf.push(s + sigma * n);
                    }
                    if det.detect(y, x, buf) != wanted_label(code, i, x) {
                        errors[i] += 1;
                    }
                }
            }
        }
    }
}

fn lane_rng(seed: u64, snr_index: usize, lane: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 32) | lane as u64);
    rng
}

/// Runs `config.trials` uniformly drawn message vectors per SNR point.
///
/// `mapping` is required for [`Scheme::QamMapped`] and rejected otherwise.
pub fn simulate(code: &IndexCode, mapping: Option<&CodewordMapping>, config: &SimConfig) -> Result<SimResult> {
    config.check()?;
    let tx = Transmitter::new(code, config.scheme, mapping)?;
    let receivers = code.problem().receivers().len();
    let message_mask = code.problem().message_mask();
    let l = code.length();

    let mut rows = Vec::with_capacity(config.snr_db.len() * receivers);
    for (snr_index, &snr_db) in config.snr_db.iter().enumerate() {
        let sigma = (n0_from_snr_db(l, snr_db) / 2.0).sqrt();
        let lanes = config.lanes as u64;
        let counts: Vec<u64> = (0..config.lanes)
            .into_par_iter()
            .map(|lane| {
                let trials = config.trials / lanes + u64::from((lane as u64) < config.trials % lanes);
                let mut rng = lane_rng(config.seed, snr_index, lane);
                let mut errors = vec![0u64; receivers];
                let mut buf = Vec::with_capacity(l);
                for _ in 0..trials {
                    let x = rng.random::<u64>() & message_mask;
                    tx.trial(code, x, sigma, &mut rng, &mut errors, &mut buf);
                }
                errors
            })
            .reduce(
                || vec![0u64; receivers],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        rows.extend(counts.into_iter().enumerate().map(|(receiver, errors)| SimRow {
            scheme: config.scheme,
            receiver,
            snr_db,
            trials: config.trials,
            errors,
        }));
    }
    Ok(SimResult {
        scheme: config.scheme,
        seed: config.seed,
        rows,
    })
}

/// Sends every message vector once without noise and counts wanted-message errors per receiver.
pub fn noiseless_sweep(code: &IndexCode, scheme: Scheme, mapping: Option<&CodewordMapping>) -> Result<Vec<u64>> {
    let n = code.problem().messages();
    if n > 24 {
        return Err(Error::Config(format!("exhaustive sweep over 2^{n} message vectors is too large")));
    }
    let tx = Transmitter::new(code, scheme, mapping)?;
    let mut errors = vec![0u64; code.problem().receivers().len()];
    let mut buf = Vec::new();
    // sigma = 0 ignores the noise draws
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for x in 0u64..1 << n {
        tx.trial(code, x, 0.0, &mut rng, &mut errors, &mut buf);
    }
    Ok(errors)
}

/// Pairwise union bound on receiver `i`'s wanted-message error rate at noise level `n0`.
///
/// Averages, over side-information realizations and transmitted points,
/// `sum Q(d / (2 sigma))` over points carrying different wanted values, `sigma^2 = N_0 / 2`.
pub fn union_bound(labeled: &[SignalPoint], code: &IndexCode, i: usize, n0: f64) -> Result<f64> {
    let sigma = (n0 / 2.0).sqrt();
    let pool = RealizationPool::new(code, i)?;
    let mut total = 0.0;
    for coset in pool.cosets() {
        let eff = effective_constellation(labeled, code, i, coset.realization)?;
        let mut sum = 0.0;
        for a in 0..eff.points.len() {
            for b in 0..eff.points.len() {
                if eff.labels[a] != eff.labels[b] {
                    sum += q_function(eff.points[a].distance_sq(&eff.points[b]).sqrt() / (2.0 * sigma));
                }
            }
        }
        total += sum / eff.points.len() as f64;
    }
    Ok(total / pool.cosets().len() as f64)
}

/// Noise level at which receiver `i`'s union bound equals `target`, by bisection in dB.
pub fn n0_for_union_bound(labeled: &[SignalPoint], code: &IndexCode, i: usize, target: f64) -> Result<f64> {
    let l = code.length();
    let (mut lo, mut hi) = (-20.0f64, 60.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if union_bound(labeled, code, i, n0_from_snr_db(l, mid))? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(n0_from_snr_db(l, 0.5 * (lo + hi)))
}

/// Comment block for results files.
pub fn results_provenance(
    problem_hash: &str,
    code: &IndexCode,
    mapping: Option<&CodewordMapping>,
    seed: u64,
) -> Provenance {
    let rows: Vec<String> = code
        .matrix()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(u8::to_string).collect::<String>())
        .collect();
    Provenance::new()
        .with("problem_hash", problem_hash)
        .with("L", rows.join(" "))
        .with("mapping_hash", mapping.map_or_else(|| "none".to_string(), CodewordMapping::hash))
        .with("seed", seed)
        .with("energy", ENERGY_CONVENTION)
}

/// Writes `scheme,receiver,snr_db,trials,errors,error_rate,stderr` (receivers one-based).
pub fn write_results<W: Write>(results: &[SimResult], mut out: W, provenance: &Provenance) -> Result<()> {
    provenance.write_comments(&mut out)?;
    writeln!(out, "scheme,receiver,snr_db,trials,errors,error_rate,stderr")?;
    for result in results {
        for r in &result.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.scheme,
                r.receiver + 1,
                sig6(r.snr_db),
                r.trials,
                r.errors,
                sig6(r.error_rate()),
                sig6(r.stderr())
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mapper::{map_codewords, MappingOptions};

    fn qam(code: &IndexCode) -> CodewordMapping {
        map_codewords(code, &MappingOptions::default()).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("qpsk".parse::<Scheme>().is_err());
    }

    #[test]
    fn snr_ranges() {
        assert_eq!(snr_range(0.0, 10.0, 2.5).unwrap(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(snr_range(3.0, 3.0, 0.0).unwrap(), vec![3.0]);
        assert_eq!(snr_range(0.0, 1.0, 0.3).unwrap().len(), 4);
        assert!(snr_range(5.0, 1.0, 1.0).is_err());
        assert!(snr_range(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn two_point_bound_is_exact_q() {
        // receiver knowing every message but one, uncoded: two points at distance d
        let p = crate::problem::IndexCodingProblem::new(2, vec![crate::problem::Receiver::new([0], [1])]).unwrap();
        let code = IndexCode::uncoded(p);
        let psk = build_psk(2).unwrap();
        let n0 = 0.7;
        let sigma = (n0 / 2.0f64).sqrt();
        let eff = effective_constellation(&psk, &code, 0, 0).unwrap();
        let d = eff.dmin_sq.sqrt();
        let expected = q_function(d / (2.0 * sigma));
        assert!((union_bound(&psk, &code, 0, n0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn noiseless_sweeps_are_error_free() {
        for code in [fixtures::example1(), fixtures::example2_l1(), fixtures::example2_l3()] {
            let mapping = qam(&code);
            assert!(noiseless_sweep(&code, Scheme::QamMapped, Some(&mapping)).unwrap().iter().all(|&e| e == 0));
            assert!(noiseless_sweep(&code, Scheme::PskArbitrary, None).unwrap().iter().all(|&e| e == 0));
            assert!(noiseless_sweep(&code, Scheme::Binary, None).unwrap().iter().all(|&e| e == 0));
        }
    }

    #[test]
    fn high_snr_is_error_free() {
        let code = fixtures::example1();
        let mapping = qam(&code);
        for scheme in Scheme::ALL {
            let m = (scheme == Scheme::QamMapped).then_some(&mapping);
            let result = simulate(&code, m, &SimConfig::new(scheme, vec![60.0], 10_000, 5)).unwrap();
            assert!(result.rows.iter().all(|r| r.errors == 0), "{scheme}");
        }
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let code = fixtures::example1();
        let mapping = qam(&code);
        let cfg = SimConfig::new(Scheme::QamMapped, vec![8.0, 10.0], 20_000, 11);
        let a = simulate(&code, Some(&mapping), &cfg).unwrap();
        let b = simulate(&code, Some(&mapping), &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate(&code, Some(&mapping), &SimConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn scheme_mapping_mismatch() {
        let code = fixtures::example1();
        let mapping = qam(&code);
        let cfg = |s| SimConfig::new(s, vec![10.0], 10, 1);
        assert!(matches!(simulate(&code, None, &cfg(Scheme::QamMapped)), Err(Error::SchemeMismatch(_))));
        assert!(matches!(simulate(&code, Some(&mapping), &cfg(Scheme::Binary)), Err(Error::SchemeMismatch(_))));
        let other = qam(&fixtures::example2_l1());
        assert!(matches!(simulate(&code, Some(&other), &cfg(Scheme::QamMapped)), Err(Error::SchemeMismatch(_))));
        assert!(matches!(
            simulate(&code, Some(&mapping), &SimConfig::new(Scheme::QamMapped, vec![], 10, 1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn binary_receivers_agree() {
        let code = fixtures::example1();
        let result = simulate(&code, None, &SimConfig::new(Scheme::Binary, vec![6.0], 200_000, 3)).unwrap();
        let rows = &result.rows;
        for a in rows {
            for b in rows {
                let spread = 3.0 * (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
                assert!((a.error_rate() - b.error_rate()).abs() <= spread, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn results_layout() {
        let code = fixtures::example1();
        let result = simulate(&code, None, &SimConfig::new(Scheme::Binary, vec![4.0], 100, 1)).unwrap();
        let mut out = Vec::new();
        write_results(&[result], &mut out, &results_provenance("abc", &code, None, 1)).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("# problem_hash: abc\n"));
        assert!(text.contains("# seed: 1\n"));
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], "scheme,receiver,snr_db,trials,errors,error_rate,stderr");
        assert_eq!(lines.len(), 8);
        assert!(lines[1].starts_with("binary,1,4,100,"));
    }
}
