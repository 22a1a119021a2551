use thiserror::Error;

/// Errors surfaced by group construction, scheme execution, and the
/// reductions. Verification *failures* are not errors: verify paths return
/// `Ok(false)` so that rejection stays distinguishable from misuse.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input must not be empty")]
    EmptyInput,
    #[error("lambda {0} is below the minimum of {1} bits")]
    LambdaTooSmall(u32, u32),
    #[error("modulus must be an odd composite of at least 15")]
    InvalidModulus,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("prime field modulus must be congruent to 3 mod 4")]
    FieldNotThreeMod4,
    #[error("value is not a unit modulo the group modulus")]
    NotAUnit,
    #[error("value is not a quadratic residue")]
    NotAQuadraticResidue,
    #[error("group trapdoor is not available on this side of the protocol")]
    TrapdoorMissing,
    #[error("delay must be at least 1")]
    DelayZero,
    #[error("delay {0} is not a power of two")]
    DelayNotPowerOfTwo(u64),
    #[error("delay {t} too large for lambda {lambda}: require T < 2^(lambda/2)")]
    DelayTooLarge { t: u64, lambda: u32 },
    #[error("scheme {scheme} does not support stepping by {steps}")]
    UnsupportedStep { scheme: String, steps: u64 },
    #[error("input and output domains differ; use the general construction with an iterated step function")]
    DomainsDistinct,
    #[error("scheme expected a {expected} value but received {got}")]
    ValueKindMismatch { expected: &'static str, got: &'static str },
    #[error("challenge rejected in round {round}: {reason}")]
    ChallengeRejected { round: usize, reason: String },
    #[error("iterated step function violates the composition law on probe pair ({0}, {1})")]
    SemigroupViolation(u64, u64),
    #[error("injective map collision between inputs {0} and {1}")]
    OwfCollision(String, String),
    #[error("input proof does not verify; refusing to merge")]
    MergeInputInvalid,
    #[error("walk budget {budget} exhausted before reaching position {position}")]
    WalkBudgetExceeded { budget: u64, position: u64 },
    #[error("vertex width {0} does not match instance width {1}")]
    WidthMismatch(usize, usize),
    #[error("position {0} outside the range [0, {1}]")]
    PositionOutOfRange(u64, u64),
    #[error("malformed envelope: {0}")]
    Envelope(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
