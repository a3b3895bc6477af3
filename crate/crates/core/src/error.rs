use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single violated invariant of an index-coding problem instance.
///
/// Receiver and message numbers are one-based, as they appear in problem files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemViolation {
    NoMessages,
    TooManyMessages { n: usize, limit: usize },
    NoReceivers,
    EmptyWants { receiver: usize },
    IndexOutOfRange { receiver: usize, index: usize, n: usize },
    DuplicateIndex { receiver: usize, index: usize },
    WantsKnown { receiver: usize, message: usize },
    KnowsEverything { receiver: usize },
}

impl fmt::Display for ProblemViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoMessages => write!(f, "problem has no messages (n = 0)"),
            Self::TooManyMessages { n, limit } => {
                write!(f, "problem has {n} messages, at most {limit} are supported")
            }
            Self::NoReceivers => write!(f, "problem has no receivers"),
            Self::EmptyWants { receiver } => {
                write!(f, "receiver {receiver} wants no message")
            }
            Self::IndexOutOfRange { receiver, index, n } => write!(
                f,
                "receiver {receiver} references message {index}, outside 1..={n}"
            ),
            Self::DuplicateIndex { receiver, index } => {
                write!(f, "receiver {receiver} lists message {index} twice")
            }
            Self::WantsKnown { receiver, message } => write!(
                f,
                "receiver {receiver} both wants and knows message {message}"
            ),
            Self::KnowsEverything { receiver } => {
                write!(f, "receiver {receiver} already knows every message")
            }
        }
    }
}

/// All invariant violations found in one problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemErrors(pub Vec<ProblemViolation>);

impl fmt::Display for ProblemErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error(
        "exact search refused for n = {n} (limit {limit}): the number of subspaces of F_2^n grows as 2^(n^2/4)"
    )]
    SearchGuard { n: usize, limit: usize },

    #[error("invalid index coding problem: {0}")]
    InvalidProblem(ProblemErrors),

    #[error("receiver {index} out of range (problem has {count} receivers)")]
    ReceiverOutOfRange { index: usize, count: usize },

    #[error("encoding matrix has rank {rank}, but {l} independent columns are required")]
    RankDeficient { rank: usize, l: usize },

    #[error("receiver {receiver} cannot decode its wanted messages with this code")]
    NotDecodable { receiver: usize },

    #[error("constellation has {found} points, code of length {l} needs {expected}")]
    ConstellationSize {
        l: usize,
        expected: usize,
        found: usize,
    },

    #[error("constellation order l = {l} outside supported range {min}..={max}")]
    ConstellationOrder { l: usize, min: usize, max: usize },

    #[error("set partitioning failed: {0}")]
    Partition(String),

    #[error("scheme/mapping mismatch: {0}")]
    SchemeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from invalid input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }

    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SearchGuard { .. } => "search_guard",
            Error::InvalidProblem(_) => "invalid_problem",
            Error::ReceiverOutOfRange { .. } => "receiver_out_of_range",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::NotDecodable { .. } => "not_decodable",
            Error::ConstellationSize { .. } => "constellation_size",
            Error::ConstellationOrder { .. } => "constellation_order",
            Error::Partition(_) => "partition",
            Error::SchemeMismatch(_) => "scheme_mismatch",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}
