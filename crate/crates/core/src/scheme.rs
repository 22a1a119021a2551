//! The scheme-agnostic VDF contract.
//!
//! A scheme implements `setup / eval / open / verify` over an abstract range
//! (group residues, field residues, or fixed-width vertices). `open` runs the
//! prover side of the interactive protocol against a [`ChallengeSource`];
//! replacing the verifier's coins with the `FS:` oracle via [`fs_compile`]
//! yields the non-interactive form. Verify is deterministic: it consumes no
//! clock and no randomness beyond the replayed or recomputed challenges.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FieldElement, GroupElement, PrimeField, UnknownOrderGroup};
use crate::hash::{encode_fields, fs_challenge, hash_to_prime, SeedStream};
use crate::search::Vertex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    DworkNaor,
    Rsw,
    Pietrzak,
    Wesolowski,
    DerivedFromRsvl,
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchemeId::DworkNaor => "dwork_naor",
            SchemeId::Rsw => "rsw",
            SchemeId::Pietrzak => "pietrzak",
            SchemeId::Wesolowski => "wesolowski",
            SchemeId::DerivedFromRsvl => "derived_from_rsvl",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for SchemeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dwork_naor" => Ok(SchemeId::DworkNaor),
            "rsw" => Ok(SchemeId::Rsw),
            "pietrzak" => Ok(SchemeId::Pietrzak),
            "wesolowski" => Ok(SchemeId::Wesolowski),
            "derived_from_rsvl" => Ok(SchemeId::DerivedFromRsvl),
            other => Err(Error::Envelope(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Interactive,
    FiatShamir,
}

/// How input bytes enter the evaluation chain: parsed as a range value
/// directly (permutation view) or mapped through the `H_G` oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMap {
    Residue,
    HashToRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofKind {
    Empty,
    Single,
    Vector,
}

/// A value in a scheme's output range.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RangeValue {
    Group(GroupElement),
    Field(FieldElement),
    Vertex(Vertex),
}

impl RangeValue {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RangeValue::Group(_) => "group",
            RangeValue::Field(_) => "field",
            RangeValue::Vertex(_) => "vertex",
        }
    }

    /// Canonical byte encoding: minimal big-endian for residues, fixed width
    /// for vertices. This is the form oracles hash and envelopes hex-encode.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            RangeValue::Group(e) => e.to_bytes(),
            RangeValue::Field(e) => e.to_bytes(),
            RangeValue::Vertex(v) => v.to_bytes(),
        }
    }

    pub fn to_hex(&self) -> String {
        match self {
            RangeValue::Group(e) => e.to_hex(),
            RangeValue::Field(e) => e.to_hex(),
            RangeValue::Vertex(v) => v.to_hex(),
        }
    }

    pub fn as_group(&self) -> Result<&GroupElement> {
        match self {
            RangeValue::Group(e) => Ok(e),
            other => Err(Error::ValueKindMismatch { expected: "group", got: other.kind_name() }),
        }
    }

    pub fn as_field(&self) -> Result<&FieldElement> {
        match self {
            RangeValue::Field(e) => Ok(e),
            other => Err(Error::ValueKindMismatch { expected: "field", got: other.kind_name() }),
        }
    }

    pub fn as_vertex(&self) -> Result<&Vertex> {
        match self {
            RangeValue::Vertex(v) => Ok(v),
            other => Err(Error::ValueKindMismatch { expected: "vertex", got: other.kind_name() }),
        }
    }
}

/// The structure backing a scheme's range.
#[derive(Debug, Clone)]
pub enum Backing {
    Group(UnknownOrderGroup),
    Field(PrimeField),
    Vertices { n: usize },
}

/// Public parameters: security bits, delay, mode, and the backing structure.
/// `setup_seed`, when present, records the seed setup ran from so envelopes
/// can offer trapdoor regeneration to trusted parties.
#[derive(Debug, Clone)]
pub struct VdfParams {
    pub scheme: SchemeId,
    pub lambda: u32,
    pub t: u64,
    pub mode: Mode,
    pub input_map: InputMap,
    pub backing: Backing,
    pub setup_seed: Option<Vec<u8>>,
}

impl VdfParams {
    /// Validates `T >= 1`, the `T < 2^(lambda/2)` cap, and the power-of-two
    /// restriction for the halving protocol.
    pub fn new(
        scheme: SchemeId,
        lambda: u32,
        t: u64,
        mode: Mode,
        input_map: InputMap,
        backing: Backing,
    ) -> Result<Self> {
        if t == 0 {
            return Err(Error::DelayZero);
        }
        let half = lambda / 2;
        if half < 64 && t >= 1u64 << half {
            return Err(Error::DelayTooLarge { t, lambda });
        }
        if scheme == SchemeId::Pietrzak && !t.is_power_of_two() {
            return Err(Error::DelayNotPowerOfTwo(t));
        }
        Ok(VdfParams { scheme, lambda, t, mode, input_map, backing, setup_seed: None })
    }

    pub fn with_setup_seed(mut self, seed: &[u8]) -> Self {
        self.setup_seed = Some(seed.to_vec());
        self
    }

    pub fn group(&self) -> Result<&UnknownOrderGroup> {
        match &self.backing {
            Backing::Group(g) => Ok(g),
            _ => Err(Error::ValueKindMismatch { expected: "group", got: "other backing" }),
        }
    }

    pub fn field(&self) -> Result<&PrimeField> {
        match &self.backing {
            Backing::Field(f) => Ok(f),
            _ => Err(Error::ValueKindMismatch { expected: "field", got: "other backing" }),
        }
    }

    /// Width in bits of the canonical vertex encoding of range values.
    pub fn range_width_bits(&self) -> usize {
        match &self.backing {
            Backing::Group(g) => g.bits() as usize,
            Backing::Field(f) => f.bits() as usize,
            Backing::Vertices { n } => *n,
        }
    }
}

/// The statement `(x, y, T)` a prover tries to convince a verifier of.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub x: Vec<u8>,
    pub y: RangeValue,
    pub t: u64,
}

impl Statement {
    /// Length-prefixed fields in the fixed order (x, y, T).
    pub fn encode(&self) -> Vec<u8> {
        encode_fields(&[&self.x, &self.y.to_bytes(), &self.t.to_be_bytes()])
    }
}

/// A proof: empty, a single element, or the halving protocol's vector of
/// midpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub kind: ProofKind,
    pub elements: Vec<RangeValue>,
}

impl Proof {
    pub fn empty() -> Self {
        Proof { kind: ProofKind::Empty, elements: Vec::new() }
    }

    pub fn single(e: RangeValue) -> Self {
        Proof { kind: ProofKind::Single, elements: vec![e] }
    }

    pub fn vector(elements: Vec<RangeValue>) -> Self {
        Proof { kind: ProofKind::Vector, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn encode(&self) -> Vec<u8> {
        let kind = match self.kind {
            ProofKind::Empty => [0u8],
            ProofKind::Single => [1u8],
            ProofKind::Vector => [2u8],
        };
        let element_bytes: Vec<Vec<u8>> = self.elements.iter().map(|e| e.to_bytes()).collect();
        let mut fields: Vec<&[u8]> = vec![&kind];
        fields.extend(element_bytes.iter().map(|b| b.as_slice()));
        encode_fields(&fields)
    }
}

/// One round of interaction: the prover's message and the challenge it drew.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub prover_message: Vec<u8>,
    pub challenge: BigUint,
}

/// Ordered rounds plus the verifier's final verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub rounds: Vec<Round>,
    pub final_accept: bool,
}

impl Transcript {
    pub fn challenges(&self) -> Vec<BigUint> {
        self.rounds.iter().map(|r| r.challenge.clone()).collect()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut parts: Vec<Vec<u8>> = Vec::with_capacity(self.rounds.len() * 2 + 1);
        for round in &self.rounds {
            parts.push(round.prover_message.clone());
            parts.push(round.challenge.to_bytes_be());
        }
        parts.push(vec![u8::from(self.final_accept)]);
        let refs: Vec<&[u8]> = parts.iter().map(|p| p.as_slice()).collect();
        encode_fields(&refs)
    }
}

/// Where challenges come from.
///
/// `Fixed` replays an explicit list verbatim; it doubles as the transcript
/// replay path and the test seam for pinning hand-traceable challenges.
/// `Seeded` models an honest interactive verifier with reproducible coins.
/// `FiatShamir` is the compiled mode: a pure function of the round input.
/// `FiatShamirChecked` recomputes like `FiatShamir` but also cross-checks a
/// claimed transcript, rejecting on the first mismatch.
#[derive(Debug, Clone)]
pub enum ChallengeSource {
    Fixed(VecDeque<BigUint>),
    Seeded(SeedStream),
    FiatShamir,
    FiatShamirChecked(VecDeque<BigUint>),
}

impl ChallengeSource {
    pub fn fixed(values: Vec<BigUint>) -> Self {
        ChallengeSource::Fixed(values.into())
    }

    pub fn fixed_u64(values: &[u64]) -> Self {
        Self::fixed(values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn seeded(seed: &[u8]) -> Self {
        ChallengeSource::Seeded(SeedStream::new("verifier-challenges", seed))
    }

    pub fn replay(rounds: &[Round]) -> Self {
        Self::fixed(rounds.iter().map(|r| r.challenge.clone()).collect())
    }

    pub fn checked_replay(rounds: &[Round]) -> Self {
        ChallengeSource::FiatShamirChecked(rounds.iter().map(|r| r.challenge.clone()).collect())
    }

    /// True when challenges are recomputed from the oracle, which forces the
    /// verifier to reconstruct each round's folded instance.
    pub fn is_fiat_shamir(&self) -> bool {
        matches!(self, ChallengeSource::FiatShamir | ChallengeSource::FiatShamirChecked(_))
    }

    /// Draw a uniform `lambda`-bit challenge for the given round input.
    pub fn uniform(&mut self, lambda: u32, round_index: usize, round_input: &[u8]) -> Result<BigUint> {
        let bound = BigUint::one() << lambda;
        match self {
            ChallengeSource::Fixed(values) => {
                let c = values.pop_front().ok_or(Error::ChallengeRejected {
                    round: round_index,
                    reason: "challenge list exhausted".into(),
                })?;
                if c >= bound {
                    return Err(Error::ChallengeRejected {
                        round: round_index,
                        reason: format!("challenge exceeds 2^{lambda}"),
                    });
                }
                Ok(c)
            }
            ChallengeSource::Seeded(stream) => Ok(stream.next_bits(u64::from(lambda))),
            ChallengeSource::FiatShamir => Ok(fs_challenge(round_input, lambda)),
            ChallengeSource::FiatShamirChecked(expected) => {
                let recomputed = fs_challenge(round_input, lambda);
                let claimed = expected.pop_front().ok_or(Error::ChallengeRejected {
                    round: round_index,
                    reason: "transcript shorter than protocol".into(),
                })?;
                if claimed != recomputed {
                    return Err(Error::ChallengeRejected {
                        round: round_index,
                        reason: "recomputed challenge mismatch".into(),
                    });
                }
                Ok(recomputed)
            }
        }
    }

    /// Draw a prime challenge of exactly `bits` bits. The `Fixed` variant
    /// hands its value through verbatim, which is the seam tests use to pin
    /// small primes.
    pub fn prime(&mut self, bits: u32, round_index: usize, fs_input: &[u8]) -> Result<BigUint> {
        match self {
            ChallengeSource::Fixed(values) => {
                let c = values.pop_front().ok_or(Error::ChallengeRejected {
                    round: round_index,
                    reason: "challenge list exhausted".into(),
                })?;
                if c < BigUint::from(2u32) {
                    return Err(Error::ChallengeRejected {
                        round: round_index,
                        reason: "prime challenge below 2".into(),
                    });
                }
                Ok(c)
            }
            ChallengeSource::Seeded(stream) => {
                let entropy = stream.next_bytes(32);
                hash_to_prime(&entropy, bits)
            }
            ChallengeSource::FiatShamir => hash_to_prime(fs_input, bits),
            ChallengeSource::FiatShamirChecked(expected) => {
                let recomputed = hash_to_prime(fs_input, bits)?;
                let claimed = expected.pop_front().ok_or(Error::ChallengeRejected {
                    round: round_index,
                    reason: "transcript shorter than protocol".into(),
                })?;
                if claimed != recomputed {
                    return Err(Error::ChallengeRejected {
                        round: round_index,
                        reason: "recomputed challenge mismatch".into(),
                    });
                }
                Ok(recomputed)
            }
        }
    }
}

/// What `open` produced: either a proof with the rounds that led to it, or
/// an aborted run with the rounds recorded so far.
#[derive(Debug, Clone)]
pub struct OpenOutcome {
    pub proof: Option<Proof>,
    pub rounds: Vec<Round>,
    pub abort: Option<String>,
}

impl OpenOutcome {
    pub fn finished(proof: Proof, rounds: Vec<Round>) -> Self {
        OpenOutcome { proof: Some(proof), rounds, abort: None }
    }

    pub fn aborted(rounds: Vec<Round>, reason: String) -> Self {
        OpenOutcome { proof: None, rounds, abort: Some(reason) }
    }
}

/// The four-part contract every scheme implements, plus the stepped entry
/// points the reductions require (`map_input` is `Eval(pp, x, 0)`, `step`
/// iterates the range).
pub trait VdfScheme: Send + Sync {
    fn id(&self) -> SchemeId;
    fn proof_kind(&self) -> ProofKind;

    /// Whether input and output domains coincide (the permutation property).
    fn domains_coincide(&self) -> bool;

    /// Map input bytes into the range: `Eval(pp, x, 0)`.
    fn map_input(&self, params: &VdfParams, x: &[u8]) -> Result<RangeValue>;

    /// Parse the canonical byte encoding of a range value. Rejects
    /// out-of-range encodings rather than reducing them.
    fn decode_range(&self, params: &VdfParams, bytes: &[u8]) -> Result<RangeValue>;

    /// Advance a range value by `steps` applications of the sequential step.
    fn step(&self, params: &VdfParams, v: &RangeValue, steps: u64) -> Result<RangeValue>;

    /// Full evaluation: input map followed by `params.t` steps.
    fn eval(&self, params: &VdfParams, x: &[u8]) -> Result<RangeValue> {
        let v = self.map_input(params, x)?;
        self.step(params, &v, params.t)
    }

    fn open(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        source: &mut ChallengeSource,
    ) -> Result<OpenOutcome>;

    fn verify(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        proof: &Proof,
        source: &mut ChallengeSource,
    ) -> Result<bool>;
}

/// A full interactive session: eval, the open/challenge loop, and the
/// verifier's verdict, with every round recorded in order.
#[derive(Debug, Clone)]
pub struct InteractiveRun {
    pub statement: Statement,
    pub proof: Proof,
    pub transcript: Transcript,
    pub accept: bool,
}

pub fn run_interactive(
    scheme: &dyn VdfScheme,
    params: &VdfParams,
    x: &[u8],
    source: &mut ChallengeSource,
) -> Result<InteractiveRun> {
    let input = scheme.map_input(params, x)?;
    let output = scheme.step(params, &input, params.t)?;
    let statement = Statement { x: x.to_vec(), y: output.clone(), t: params.t };
    let outcome = scheme.open(params, &input, &output, params.t, source)?;
    match outcome.proof {
        None => Ok(InteractiveRun {
            statement,
            proof: Proof::empty(),
            transcript: Transcript { rounds: outcome.rounds, final_accept: false },
            accept: false,
        }),
        Some(proof) => {
            let mut replay = ChallengeSource::replay(&outcome.rounds);
            let accept = scheme.verify(params, &input, &output, params.t, &proof, &mut replay)?;
            Ok(InteractiveRun {
                statement,
                proof,
                transcript: Transcript { rounds: outcome.rounds, final_accept: accept },
                accept,
            })
        }
    }
}

/// The Fiat-Shamir compiler: wrap an interactive scheme so that every
/// challenge is the oracle applied to the running transcript prefix. The
/// compiled open takes no counterparty at all.
#[derive(Clone)]
pub struct FsCompiled {
    inner: Arc<dyn VdfScheme>,
}

pub fn fs_compile(inner: Arc<dyn VdfScheme>) -> FsCompiled {
    FsCompiled { inner }
}

impl FsCompiled {
    pub fn open(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
    ) -> Result<OpenOutcome> {
        self.inner.open(params, input, output, t, &mut ChallengeSource::FiatShamir)
    }

    pub fn verify(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        proof: &Proof,
    ) -> Result<bool> {
        self.inner.verify(params, input, output, t, proof, &mut ChallengeSource::FiatShamir)
    }

    /// Honest non-interactive run. No verifier is consulted anywhere.
    pub fn run(&self, params: &VdfParams, x: &[u8]) -> Result<InteractiveRun> {
        let input = self.inner.map_input(params, x)?;
        let output = self.inner.step(params, &input, params.t)?;
        let statement = Statement { x: x.to_vec(), y: output.clone(), t: params.t };
        let outcome = self.open(params, &input, &output, params.t)?;
        match outcome.proof {
            None => Ok(InteractiveRun {
                statement,
                proof: Proof::empty(),
                transcript: Transcript { rounds: outcome.rounds, final_accept: false },
                accept: false,
            }),
            Some(proof) => {
                let accept = self.verify(params, &input, &output, params.t, &proof)?;
                Ok(InteractiveRun {
                    statement,
                    proof,
                    transcript: Transcript { rounds: outcome.rounds, final_accept: accept },
                    accept,
                })
            }
        }
    }

    /// Verify a claimed transcript: recompute every challenge from the
    /// oracle and reject on the first mismatch, then run the base verify.
    pub fn verify_transcript(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        proof: &Proof,
        transcript: &Transcript,
    ) -> Result<bool> {
        let mut source = ChallengeSource::checked_replay(&transcript.rounds);
        match self.inner.verify(params, input, output, t, proof, &mut source) {
            Ok(v) => Ok(v),
            Err(Error::ChallengeRejected { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

impl VdfScheme for FsCompiled {
    fn id(&self) -> SchemeId {
        self.inner.id()
    }

    fn proof_kind(&self) -> ProofKind {
        self.inner.proof_kind()
    }

    fn domains_coincide(&self) -> bool {
        self.inner.domains_coincide()
    }

    fn map_input(&self, params: &VdfParams, x: &[u8]) -> Result<RangeValue> {
        self.inner.map_input(params, x)
    }

    fn decode_range(&self, params: &VdfParams, bytes: &[u8]) -> Result<RangeValue> {
        self.inner.decode_range(params, bytes)
    }

    fn step(&self, params: &VdfParams, v: &RangeValue, steps: u64) -> Result<RangeValue> {
        self.inner.step(params, v, steps)
    }

    fn open(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        _source: &mut ChallengeSource,
    ) -> Result<OpenOutcome> {
        FsCompiled::open(self, params, input, output, t)
    }

    fn verify(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        proof: &Proof,
        _source: &mut ChallengeSource,
    ) -> Result<bool> {
        FsCompiled::verify(self, params, input, output, t, proof)
    }
}

/// Ground-truth membership oracle for the language of triples `(x, y, T)`:
/// recomputes the honest evaluation. Test-scale only; cost is `T` steps.
pub fn check_language_membership(
    scheme: &dyn VdfScheme,
    params: &VdfParams,
    statement: &Statement,
) -> Result<bool> {
    let input = scheme.map_input(params, &statement.x)?;
    let honest = scheme.step(params, &input, statement.t)?;
    Ok(honest == statement.y)
}
