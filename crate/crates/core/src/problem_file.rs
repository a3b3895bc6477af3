//! JSON problem files.
//!
//! ```json
//! {
//!   "n": 3,
//!   "receivers": [ {"wants": [1], "knows": [2]}, {"wants": [2], "knows": []} ],
//!   "L": [[1, 0], [1, 1], [0, 1]]
//! }
//! ```
//!
//! Message numbers are one-based. `L` is optional and given row-major (`n` rows).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::code::IndexCode;
use crate::error::{Error, ProblemErrors, ProblemViolation, Result};
use crate::gf2::BitMatrix;
use crate::problem::{validate, IndexCodingProblem, Receiver};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverEntry {
    pub wants: Vec<usize>,
    #[serde(default)]
    pub knows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub receivers: Vec<ReceiverEntry>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<Vec<Vec<u8>>>,
}

/// A loaded problem, with the encoding matrix if the file carried one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub problem: IndexCodingProblem,
    pub encoding: Option<BitMatrix>,
}

impl Instance {
    pub fn new(problem: IndexCodingProblem, encoding: Option<BitMatrix>) -> Self {
        Self { problem, encoding }
    }

    pub fn from_code(code: &IndexCode) -> Self {
        Self::new(code.problem().clone(), Some(code.matrix().clone()))
    }

    /// The code given in the file, if any.
    pub fn code(&self) -> Option<Result<IndexCode>> {
        self.encoding
            .as_ref()
            .map(|l| IndexCode::new(self.problem.clone(), l.clone()))
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            n: self.problem.messages(),
            receivers: self
                .problem
                .receivers()
                .iter()
                .map(|r| ReceiverEntry {
                    wants: r.wants().iter().map(|k| k + 1).collect(),
                    knows: r.knows().iter().map(|k| k + 1).collect(),
                })
                .collect(),
            encoding: self.encoding.as_ref().map(BitMatrix::to_rows),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("problem file serializes")
    }

    /// Content hash of the canonical compact encoding (first 16 hex digits of SHA-256).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.to_file()).expect("problem file serializes");
        short_hash(canonical.as_bytes())
    }
}

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..8])
}

/// Parses a problem file. `origin` names the source in error messages.
pub fn parse_instance(text: &str, origin: &str) -> Result<Instance> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let lines = LineIndex::new(text);
    let at_receiver = |r: usize| lines.array_element_line("receivers", r).unwrap_or(1);

    let mut violations: Vec<(usize, ProblemViolation)> = Vec::new();
    let mut receivers = Vec::with_capacity(file.receivers.len());
    for (r, entry) in file.receivers.iter().enumerate() {
        let zero_based = |list: &[usize]| -> Vec<usize> {
            list.iter().filter(|&&k| k > 0).map(|&k| k - 1).collect()
        };
        if entry.wants.iter().chain(&entry.knows).any(|&k| k == 0) {
            violations.push((
                at_receiver(r),
                ProblemViolation::IndexOutOfRange {
                    receiver: r + 1,
                    index: 0,
                    n: file.n,
                },
            ));
        }
        receivers.push(Receiver::new(zero_based(&entry.wants), zero_based(&entry.knows)));
    }
    if let Err(ProblemErrors(found)) = validate(file.n, &receivers) {
        for v in found {
            let line = violation_receiver(&v).map(|r| at_receiver(r - 1)).unwrap_or(1);
            violations.push((line, v));
        }
    }
    if !violations.is_empty() {
        violations.sort_by_key(|(line, _)| *line);
        let message = violations
            .iter()
            .map(|(line, v)| format!("{v} (line {line})"))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Parse {
            path: origin.to_string(),
            line: violations[0].0,
            column: 1,
            message,
        });
    }
    let problem = IndexCodingProblem::new(file.n, receivers)?;

    let encoding = match &file.encoding {
        None => None,
        Some(rows) => {
            let line = lines.key_line("L").unwrap_or(1);
            let fail = |message: String| Error::Parse {
                path: origin.to_string(),
                line,
                column: 1,
                message,
            };
            if rows.len() != file.n {
                return Err(fail(format!("L has {} rows, expected n = {}", rows.len(), file.n)));
            }
            let cols = rows.first().map_or(0, Vec::len);
            if cols == 0 || rows.iter().any(|r| r.len() != cols) {
                return Err(fail("L rows must be nonempty and of equal length".into()));
            }
            if rows.iter().flatten().any(|&b| b > 1) {
                return Err(fail("L entries must be 0 or 1".into()));
            }
            Some(BitMatrix::from_rows(rows)?)
        }
    };
    let instance = Instance::new(problem, encoding);
    if let Some(code) = instance.code() {
        code.map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: lines.key_line("L").unwrap_or(1),
            column: 1,
            message: e.to_string(),
        })?;
    }
    Ok(instance)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text, &path.display().to_string())
}

pub fn save_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    let mut text = instance.to_json_pretty();
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn violation_receiver(v: &ProblemViolation) -> Option<usize> {
    match v {
        ProblemViolation::EmptyWants { receiver }
        | ProblemViolation::IndexOutOfRange { receiver, .. }
        | ProblemViolation::DuplicateIndex { receiver, .. }
        | ProblemViolation::WantsKnown { receiver, .. }
        | ProblemViolation::KnowsEverything { receiver } => Some(*receiver),
        _ => None,
    }
}

/// Locates top-level keys and array elements in already-valid JSON text.
struct LineIndex<'a> {
    text: &'a str,
}

impl<'a> LineIndex<'a> {
    fn new(text: &'a str) -> Self {
        Self { text }
    }

    fn line_of(&self, byte: usize) -> usize {
        1 + self.text[..byte].bytes().filter(|&b| b == b'\n').count()
    }

    // byte offset just after the top-level key's colon
    fn key_value_start(&self, key: &str) -> Option<usize> {
        let bytes = self.text.as_bytes();
        let mut depth = 0usize;
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'{' | b'[' => depth += 1,
                b'}' | b']' => depth = depth.saturating_sub(1),
                b'"' => {
                    let end = string_end(bytes, i);
                    if depth == 1 && &self.text[i + 1..end] == key {
                        let colon = self.text[end + 1..].find(':')? + end + 1;
                        return Some(colon + 1);
                    }
                    i = end;
                }
                _ => {}
            }
            i += 1;
        }
        None
    }

    fn key_line(&self, key: &str) -> Option<usize> {
        self.key_value_start(key).map(|p| self.line_of(p))
    }

    fn array_element_line(&self, key: &str, index: usize) -> Option<usize> {
        let bytes = self.text.as_bytes();
        let mut i = self.key_value_start(key)?;
        while i < bytes.len() && bytes[i] != b'[' {
            i += 1;
        }
        let mut depth = 0usize;
        let mut element = 0usize;
        let mut expecting = true;
        while i < bytes.len() {
            let b = bytes[i];
            if depth == 1 && expecting && !b.is_ascii_whitespace() && b != b',' && b != b']' {
                if element == index {
                    return Some(self.line_of(i));
                }
                element += 1;
                expecting = false;
            }
            match b {
                b'[' | b'{' => depth += 1,
                b']' | b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        return None;
                    }
                }
                b',' if depth == 1 => expecting = true,
                b'"' => i = string_end(bytes, i),
                _ => {}
            }
            i += 1;
        }
        None
    }
}

// index of the closing quote of the string starting at `start`
fn string_end(bytes: &[u8], start: usize) -> usize {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => return i,
            _ => i += 1,
        }
    }
    bytes.len()
}
