//! Index-coding problem instances `{X, R}`.
//!
//! Messages are numbered `0..n` internally. Problem files and every
//! user-facing message use one-based numbering, matching the usual `x_1..x_n`.

use crate::error::{Error, ProblemErrors, ProblemViolation, Result};

/// Largest message count supported; message vectors are packed in a `u64`.
pub const MAX_MESSAGES: usize = 64;

/// One receiver `R_i = {W_i, K_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Receiver {
    wants: Vec<usize>,
    knows: Vec<usize>,
}

impl Receiver {
    /// Builds a receiver from zero-based message indices. Lists are sorted;
    /// duplicates and range problems are reported by [`validate`].
    pub fn new(wants: impl IntoIterator<Item = usize>, knows: impl IntoIterator<Item = usize>) -> Self {
        let mut wants: Vec<usize> = wants.into_iter().collect();
        let mut knows: Vec<usize> = knows.into_iter().collect();
        wants.sort_unstable();
        knows.sort_unstable();
        Self { wants, knows }
    }

    /// Builds a receiver from one-based message numbers.
    ///
    /// # Panics
    /// Panics if any number is zero.
    pub fn one_based(wants: &[usize], knows: &[usize]) -> Self {
        let shift = |v: &[usize]| -> Vec<usize> {
            v.iter()
                .map(|&k| k.checked_sub(1).expect("message numbers start at 1"))
                .collect()
        };
        Self::new(shift(wants), shift(knows))
    }

    pub fn wants(&self) -> &[usize] {
        &self.wants
    }

    pub fn knows(&self) -> &[usize] {
        &self.knows
    }

    pub fn knows_mask(&self) -> u64 {
        self.knows.iter().fold(0, |m, &k| m | 1 << k)
    }

    pub fn wants_mask(&self) -> u64 {
        self.wants.iter().fold(0, |m, &k| m | 1 << k)
    }
}

/// Outcome of a successful validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationReport {
    pub messages: usize,
    pub receivers: usize,
    /// Every receiver wants exactly one message and no two want the same one.
    pub single_unicast: bool,
}

/// Checks every invariant of a problem instance and names each violation.
pub fn validate(n: usize, receivers: &[Receiver]) -> std::result::Result<ValidationReport, ProblemErrors> {
    let mut violations = Vec::new();
    if n == 0 {
        violations.push(ProblemViolation::NoMessages);
    }
    if n > MAX_MESSAGES {
        violations.push(ProblemViolation::TooManyMessages {
            n,
            limit: MAX_MESSAGES,
        });
    }
    if receivers.is_empty() {
        violations.push(ProblemViolation::NoReceivers);
    }
    for (r, rx) in receivers.iter().enumerate() {
        let receiver = r + 1;
        if rx.wants.is_empty() {
            violations.push(ProblemViolation::EmptyWants { receiver });
        }
        for list in [&rx.wants, &rx.knows] {
            for w in list.windows(2).filter(|w| w[0] == w[1]) {
                violations.push(ProblemViolation::DuplicateIndex {
                    receiver,
                    index: w[0] + 1,
                });
            }
            for &k in list.iter().filter(|&&k| k >= n) {
                violations.push(ProblemViolation::IndexOutOfRange {
                    receiver,
                    index: k + 1,
                    n,
                });
            }
        }
        for &w in rx.wants.iter().filter(|w| rx.knows.binary_search(w).is_ok()) {
            violations.push(ProblemViolation::WantsKnown {
                receiver,
                message: w + 1,
            });
        }
        let mut distinct_known = rx.knows.clone();
        distinct_known.dedup();
        if n > 0 && distinct_known.iter().filter(|&&k| k < n).count() == n {
            violations.push(ProblemViolation::KnowsEverything { receiver });
        }
    }
    if !violations.is_empty() {
        return Err(ProblemErrors(violations));
    }
    let mut wanted: Vec<usize> = receivers.iter().flat_map(|r| r.wants.iter().copied()).collect();
    let total = wanted.len();
    wanted.sort_unstable();
    wanted.dedup();
    Ok(ValidationReport {
        messages: n,
        receivers: receivers.len(),
        single_unicast: receivers.iter().all(|r| r.wants.len() == 1) && wanted.len() == total,
    })
}

/// A validated index-coding problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexCodingProblem {
    n: usize,
    receivers: Vec<Receiver>,
}

impl IndexCodingProblem {
    pub fn new(n: usize, receivers: Vec<Receiver>) -> Result<Self> {
        validate(n, &receivers).map_err(Error::InvalidProblem)?;
        Ok(Self { n, receivers })
    }

    /// Number of messages `n`.
    pub fn messages(&self) -> usize {
        self.n
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn receiver(&self, i: usize) -> Result<&Receiver> {
        self.receivers.get(i).ok_or(Error::ReceiverOutOfRange {
            index: i,
            count: self.receivers.len(),
        })
    }

    pub fn report(&self) -> ValidationReport {
        validate(self.n, &self.receivers).expect("problem was validated on construction")
    }

    /// Mask with the low `n` bits set.
    pub fn message_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Replaces every receiver wanting several messages by one receiver per
    /// wanted message, each keeping the original side information.
    pub fn split_demands(&self) -> IndexCodingProblem {
        let receivers = self
            .receivers
            .iter()
            .flat_map(|r| r.wants.iter().map(|&w| Receiver::new([w], r.knows.iter().copied())))
            .collect();
        IndexCodingProblem {
            n: self.n,
            receivers,
        }
    }
}
