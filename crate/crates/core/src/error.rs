use alloc::string::String;

/// Errors raised by the engine. Verification outcomes are reported through
/// report types, not through this enum.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("characteristic 2 is not allowed (GKM condition)")]
    CharacteristicTwo,
    #[error("{0} is not an admissible characteristic (must be 0 or an odd prime)")]
    NotPrime(u64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cutoff too low: a generator appears in degree {degree} with cutoff {cutoff} and guard {guard}")]
    CutoffTooLow { degree: i64, cutoff: i64, guard: i64 },
    #[error("no solution: vector is not in the image")]
    NoSolution,
    #[error("sublattice is not saturated (elementary divisors {0:?})")]
    NotSaturated(alloc::vec::Vec<i64>),
    #[error("generator {generator} is not a moment graph automorphism: {detail}")]
    NotAutomorphism { generator: usize, detail: String },
    #[error("unsupported type: {0}")]
    UnsupportedType(String),
    #[error("window closure uncertified: {0}")]
    ClosureUncertified(String),
    #[error("base alcove is not inside the box")]
    WNotInBox,
    #[error("subset is not open (not downward closed): {0}")]
    NotOpen(String),
    #[error("support condition (S) violated at {0}")]
    SupportViolation(String),
    #[error("restriction at {0} is not surjective; the object is not flabby")]
    NotFlabby(String),
    #[error("not an endomorphism: {0}")]
    NotEndomorphism(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not comparable in the Bruhat order")]
    NotComparable,
}
