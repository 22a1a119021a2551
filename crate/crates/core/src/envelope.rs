//! Canonical JSON envelopes for everything that crosses a process boundary:
//! group descriptors, public parameters, statements with proofs and
//! transcripts, search-problem instances, solutions, and the shipped
//! test-vector lines.
//!
//! Integers are hex, big-endian, lowercase. The group descriptor never
//! carries the trapdoor; parameter envelopes may carry the setup seed
//! instead, from which a trusted party can re-derive it.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{PrimeField, UnknownOrderGroup};
use crate::scheme::{
    Backing, InputMap, Mode, Proof, ProofKind, RangeValue, Round, SchemeId, Statement, Transcript,
    VdfParams,
};
use crate::search::Vertex;

pub const SCHEMA_VERSION: u32 = 1;

pub fn to_hex(value: &BigUint) -> String {
    format!("{value:x}")
}

pub fn from_hex(hex: &str) -> Result<BigUint> {
    BigUint::parse_bytes(hex.as_bytes(), 16)
        .ok_or_else(|| Error::Envelope(format!("bad hex integer `{hex}`")))
}

pub fn bytes_to_hex(bytes: &[u8]) -> String {
    hex::encode(bytes)
}

pub fn bytes_from_hex(s: &str) -> Result<Vec<u8>> {
    hex::decode(s).map_err(|e| Error::Envelope(format!("bad hex bytes `{s}`: {e}")))
}

/// `{"modulus_hex", "bits"}` and nothing else.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub modulus_hex: String,
    pub bits: u64,
}

impl GroupDescriptor {
    pub fn of(group: &UnknownOrderGroup) -> Self {
        GroupDescriptor { modulus_hex: to_hex(group.modulus()), bits: group.bits() }
    }

    pub fn to_group(&self) -> Result<UnknownOrderGroup> {
        UnknownOrderGroup::from_modulus(from_hex(&self.modulus_hex)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub p_hex: String,
    pub bits: u64,
}

impl FieldDescriptor {
    pub fn of(field: &PrimeField) -> Self {
        FieldDescriptor { p_hex: to_hex(field.modulus()), bits: field.bits() }
    }

    pub fn to_field(&self) -> Result<PrimeField> {
        PrimeField::new(from_hex(&self.p_hex)?)
    }
}

/// Public parameters envelope. `seed_hex`, when present, lets a trusted
/// party re-run setup and recover the trapdoor; the trapdoor itself is never
/// written.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsEnvelope {
    pub schema: u32,
    pub scheme: SchemeId,
    pub lambda: u32,
    #[serde(rename = "T")]
    pub t: u64,
    pub mode: Mode,
    pub input_map: InputMap,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_hex: Option<String>,
}

impl ParamsEnvelope {
    pub fn of(params: &VdfParams, seed: Option<&[u8]>) -> Self {
        let (group, field, vertex_width) = match &params.backing {
            Backing::Group(g) => (Some(GroupDescriptor::of(g)), None, None),
            Backing::Field(f) => (None, Some(FieldDescriptor::of(f)), None),
            Backing::Vertices { n } => (None, None, Some(*n)),
        };
        ParamsEnvelope {
            schema: SCHEMA_VERSION,
            scheme: params.scheme,
            lambda: params.lambda,
            t: params.t,
            mode: params.mode,
            input_map: params.input_map,
            group,
            field,
            vertex_width,
            seed_hex: seed.or(params.setup_seed.as_deref()).map(bytes_to_hex),
        }
    }

    /// Rebuild parameters. When `with_trapdoor` is set and a seed is
    /// present, the group is re-sampled from the seed so the totient oracle
    /// works; the re-sampled modulus must match the descriptor.
    pub fn to_params(&self, with_trapdoor: bool) -> Result<VdfParams> {
        let backing = if let Some(gd) = &self.group {
            let group = if with_trapdoor {
                let seed_hex = self.seed_hex.as_ref().ok_or_else(|| {
                    Error::Envelope("trapdoor requested but no setup seed present".into())
                })?;
                let regenerated = UnknownOrderGroup::sample(self.lambda, &bytes_from_hex(seed_hex)?)?;
                if to_hex(regenerated.modulus()) != gd.modulus_hex {
                    return Err(Error::Envelope("seed does not reproduce the modulus".into()));
                }
                regenerated
            } else {
                gd.to_group()?
            };
            Backing::Group(group)
        } else if let Some(fd) = &self.field {
            Backing::Field(fd.to_field()?)
        } else if let Some(n) = self.vertex_width {
            Backing::Vertices { n }
        } else {
            return Err(Error::Envelope("params envelope carries no backing".into()));
        };
        let mut params =
            VdfParams::new(self.scheme, self.lambda, self.t, self.mode, self.input_map, backing)?;
        if let Some(seed_hex) = &self.seed_hex {
            params.setup_seed = Some(bytes_from_hex(seed_hex)?);
        }
        Ok(params)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RoundEnvelope {
    pub message_hex: String,
    pub challenge_hex: String,
}

/// `{scheme, lambda, T, x_hex, y_hex, proof_hex[], rounds[]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatementEnvelope {
    pub schema: u32,
    pub scheme: SchemeId,
    pub lambda: u32,
    #[serde(rename = "T")]
    pub t: u64,
    pub x_hex: String,
    pub y_hex: String,
    pub proof_hex: Vec<String>,
    pub rounds: Vec<RoundEnvelope>,
}

impl StatementEnvelope {
    pub fn of(
        scheme: SchemeId,
        lambda: u32,
        statement: &Statement,
        proof: &Proof,
        transcript: Option<&Transcript>,
    ) -> Self {
        StatementEnvelope {
            schema: SCHEMA_VERSION,
            scheme,
            lambda,
            t: statement.t,
            x_hex: bytes_to_hex(&statement.x),
            y_hex: bytes_to_hex(&statement.y.to_bytes()),
            proof_hex: proof.elements.iter().map(|e| bytes_to_hex(&e.to_bytes())).collect(),
            rounds: transcript
                .map(|tr| {
                    tr.rounds
                        .iter()
                        .map(|r| RoundEnvelope {
                            message_hex: bytes_to_hex(&r.prover_message),
                            challenge_hex: to_hex(&r.challenge),
                        })
                        .collect()
                })
                .unwrap_or_default(),
        }
    }

    pub fn rounds_to_transcript(&self) -> Result<Transcript> {
        let rounds = self
            .rounds
            .iter()
            .map(|r| {
                Ok(Round {
                    prover_message: bytes_from_hex(&r.message_hex)?,
                    challenge: from_hex(&r.challenge_hex)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Transcript { rounds, final_accept: false })
    }

    /// Reassemble the proof in a scheme's range. `decode` parses one
    /// element's canonical bytes.
    pub fn proof_with(
        &self,
        kind: ProofKind,
        decode: impl Fn(&[u8]) -> Result<RangeValue>,
    ) -> Result<Proof> {
        let elements = self
            .proof_hex
            .iter()
            .map(|h| decode(&bytes_from_hex(h)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Proof { kind, elements })
    }
}

/// Search-problem instance descriptor: `{family, n, T, v0_hex, params{...}}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceDescriptor {
    pub family: String,
    pub n: usize,
    #[serde(rename = "T")]
    pub t: u64,
    pub v0_hex: String,
    pub params: serde_json::Value,
}

/// `{"sink": v_hex}` or `{"false_positive": [v_hex, i]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SolutionEnvelope {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sink: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub false_positive: Option<(String, u64)>,
}

impl SolutionEnvelope {
    pub fn of(solution: &crate::search::RsvlSolution) -> Self {
        match solution {
            crate::search::RsvlSolution::Sink(v) => {
                SolutionEnvelope { sink: Some(v.to_hex()), false_positive: None }
            }
            crate::search::RsvlSolution::FalsePositive(v, i) => {
                SolutionEnvelope { sink: None, false_positive: Some((v.to_hex(), *i)) }
            }
        }
    }

    pub fn to_solution(&self, n: usize) -> Result<crate::search::RsvlSolution> {
        match (&self.sink, &self.false_positive) {
            (Some(v), None) => Ok(crate::search::RsvlSolution::Sink(Vertex::from_hex(n, v)?)),
            (None, Some((v, i))) => {
                Ok(crate::search::RsvlSolution::FalsePositive(Vertex::from_hex(n, v)?, *i))
            }
            _ => Err(Error::Envelope("solution must be exactly one of sink/false_positive".into())),
        }
    }
}

/// One shipped test-vector line:
/// `{scheme, N_hex, g_hex, T, y_hex, proof_hex[], expect}` plus optional
/// pinned challenges for the hand-traceable protocols.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorLine {
    pub scheme: SchemeId,
    #[serde(rename = "N_hex")]
    pub n_hex: String,
    pub g_hex: String,
    #[serde(rename = "T")]
    pub t: u64,
    pub y_hex: String,
    pub proof_hex: Vec<String>,
    pub expect: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub challenges_hex: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell_hex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_hex: Option<String>,
}
