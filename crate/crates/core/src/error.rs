use alloc::string::String;

/// Errors raised by constructions, measures and certificates.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range for finite sequence of length {len}")]
    IndexOutOfRange { index: u64, len: usize },
    #[error("convergence cannot be decided from finite data")]
    Undecidable,
    #[error("series diverges")]
    DivergentSeries,
    #[error("depth {requested} exceeds the configured limit {limit}")]
    DepthLimit { requested: u32, limit: u32 },
    #[error("the first {0} balls cover the ambient space")]
    EmptyRemainder(usize),
    #[error("thickness witness does not fit at level {level}")]
    FailsThickness { level: u32 },
    #[error("required dyadic level {required} exceeds resolution budget {budget}")]
    ResolutionExhausted { required: u32, budget: u32 },
    #[error("invalid node address (level {level}, index {index})")]
    InvalidNode { level: u32, index: u64 },
    #[error("tree is not aligned with the measure base: {0}")]
    Misaligned(String),
    #[error("sampled ball has zero mass at x = {0}")]
    ZeroMassBall(String),
    #[error("space is not uniformly perfect at realized scales (gap ratio {0})")]
    NotUniformlyPerfect(String),
    #[error("tail sum bound is not below 1 at truncation {0}")]
    TailTooLarge(u64),
    #[error("series of t-th powers diverges")]
    NotInEllT,
    #[error("series converges; no thinness certificate on this route")]
    SeriesConverges,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("largest gap {gap} is below the required N^-R bound")]
    GapTooSmall { gap: String },
    #[error("no exponent p satisfies 0 < p < t/(R s + 1)")]
    ExponentWindowEmpty,
    #[error("prefix lengths exceed the declared total")]
    LengthMismatch,
    #[error("table is not strictly increasing at position {0}")]
    NonMonotone(usize),
    #[error("value is not exactly representable at this depth: {0}")]
    Inexact(String),
    #[error("construction exceeds the node limit {0}")]
    NodeLimit(usize),
    #[error("no progress within {0} iterations")]
    NoProgress(u64),
}

pub type Result<T> = core::result::Result<T, Error>;
