use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("non-finite coordinate at point {index}")]
    NonFiniteCoordinate { index: usize },
    #[error("sample budget {m} out of range [1, {n}]")]
    BudgetOutOfRange { m: usize, n: usize },
    #[error("seed index {seed} out of range for {n} points")]
    SeedOutOfRange { seed: usize, n: usize },
    #[error("seed index {seed} is not among the {candidates} retained candidates")]
    SeedNotInCandidates { seed: usize, candidates: usize },
    #[error("pruning ratio {0} outside [0, 1)")]
    InvalidPruneRatio(f64),
    #[error("candidate pruning left no points")]
    PruneLeavesNothing,
    #[error("layer budgets must be non-empty")]
    EmptyBudgets,
    #[error("layer budgets must be non-increasing and >= 1: {0:?}")]
    BudgetsNotMonotone(Vec<usize>),
    #[error("first layer budget {m1} exceeds cloud size {n}")]
    BudgetExceedsCloud { m1: usize, n: usize },
    #[error("prefix of length {m} requested from a cache of {len} entries")]
    PrefixTooLong { m: usize, len: usize },
    #[error("all points are equidistant from the centroid; radial range is empty")]
    DegenerateRange,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("histogram needs at least 2 bins, got {0}")]
    InvalidBins(usize),
    #[error("histograms have different bin edges")]
    BinMismatch,
    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("corrupt cache record: {0}")]
    CorruptCache(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable variant name, used for structured error reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyCloud => "EmptyCloud",
            Error::NonFiniteCoordinate { .. } => "NonFiniteCoordinate",
            Error::BudgetOutOfRange { .. } => "BudgetOutOfRange",
            Error::SeedOutOfRange { .. } => "SeedOutOfRange",
            Error::SeedNotInCandidates { .. } => "SeedNotInCandidates",
            Error::InvalidPruneRatio(_) => "InvalidPruneRatio",
            Error::PruneLeavesNothing => "PruneLeavesNothing",
            Error::EmptyBudgets => "EmptyBudgets",
            Error::BudgetsNotMonotone(_) => "BudgetsNotMonotone",
            Error::BudgetExceedsCloud { .. } => "BudgetExceedsCloud",
            Error::PrefixTooLong { .. } => "PrefixTooLong",
            Error::DegenerateRange => "DegenerateRange",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::InvalidBins(_) => "InvalidBins",
            Error::BinMismatch => "BinMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::Parse { .. } => "ParseError",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::CorruptCache(_) => "CorruptCache",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
