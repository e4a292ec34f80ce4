use alloc::string::String;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("mismatched input lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("group too small: sizes {n1} and {n2}, need at least {min} per group")]
    GroupTooSmall { n1: usize, n2: usize, min: usize },
    #[error("degenerate variance with nonzero mean difference")]
    DegenerateVariance,
    #[error("zero margin in the 2x2 table")]
    ZeroMargin,
    #[error("no admissible threshold under the trim policy")]
    NoAdmissibleThreshold,
    #[error("outcome must be binary (0/1) for the chi-square statistic")]
    NonBinaryOutcome,
    #[error("outcome has a single class")]
    DegenerateOutcome,
    #[error("feature is constant")]
    ConstantFeature,
    #[error("exhaustive enumeration of {n}! permutations exceeds the cap {cap}")]
    ExhaustiveCapExceeded { n: usize, cap: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
