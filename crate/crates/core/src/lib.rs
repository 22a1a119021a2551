//! A toolkit for verifiable delay functions over RSA groups of unknown
//! order, the search problems they embed into, and the executable
//! reductions in both directions.
//!
//! The pieces:
//!
//! * [`group`] — residue arithmetic with exact operation counting, plus the
//!   domain-separated hash oracles in [`hash`].
//! * [`scheme`] — the `setup / eval / open / verify` contract, interactive
//!   transcripts, and the Fiat-Shamir compiler.
//! * [`schemes`] — four concrete constructions: square roots over `F_p`,
//!   the RSW time-lock puzzle, the halving protocol with proof-merging, and
//!   the single-element proof of exponentiation.
//! * [`search`] — end-of-line problems and relaxed verifiable lines, with
//!   walkers, solution checkers, and the source-shift rebasing.
//! * [`reduction`] — schemes to line instances and back, including the
//!   derived proof-free scheme and its injective-map generalization.
//! * [`envelope`] — the canonical JSON forms everything serializes to.

pub mod counter;
pub mod envelope;
pub mod error;
pub mod group;
pub mod hash;
pub mod reduction;
pub mod scheme;
pub mod schemes;
pub mod search;

pub use counter::{measure, OpCounter};
pub use error::{Error, Result};
pub use group::{FieldElement, GroupElement, PrimeField, UnknownOrderGroup};
pub use scheme::{
    check_language_membership, fs_compile, run_interactive, Backing, ChallengeSource, FsCompiled,
    InputMap, InteractiveRun, Mode, OpenOutcome, Proof, ProofKind, RangeValue, Round, SchemeId,
    Statement, Transcript, VdfParams, VdfScheme,
};
pub use search::{RsvlInstance, RsvlSolution, Vertex};
