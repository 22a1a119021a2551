//! The single-element proof of exponentiation.
//!
//! For `y = g^(2^T)` the verifier draws a `2*lambda`-bit prime
//! `l = H_prime(bin(g) || bin(y))`, the prover answers with
//! `pi = g^(floor(2^T / l))`, and the check is
//! `y = pi^l * g^(2^T mod l)`: at most `2 log l` squarings. The quotient is
//! taken by direct long division of the `T+1`-bit number `2^T`, which is
//! fine at desk scale.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::group::{GroupElement, UnknownOrderGroup};
use crate::hash::encode_fields;
use crate::scheme::{
    ChallengeSource, OpenOutcome, Proof, ProofKind, Round, RangeValue, SchemeId, VdfParams,
    VdfScheme,
};

use super::support::{decode_residue, group_map_input};

/// `pi` with the prime challenge and residue exponent it answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WesolowskiProof {
    pub pi: GroupElement,
    pub ell: BigUint,
    pub remainder: BigUint,
}

fn ell_input(g: &GroupElement, y: &GroupElement) -> Vec<u8> {
    encode_fields(&[b"wesolowski-ell", &g.to_bytes(), &y.to_bytes()])
}

fn quotient_and_remainder(t: u64, ell: &BigUint) -> (BigUint, BigUint) {
    let power = BigUint::one() << t;
    power.div_rem(ell)
}

/// Prover side: draw `l`, answer `pi = g^(floor(2^T / l))`.
pub fn wesolowski_open(
    group: &UnknownOrderGroup,
    lambda: u32,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    source: &mut ChallengeSource,
) -> Result<(WesolowskiProof, Vec<Round>)> {
    let ell = source.prime(2 * lambda, 0, &ell_input(g, y))?;
    Ok(open_with(group, g, y, t, ell))
}

/// The pinned-`l` seam for hand-traceable vectors. Production paths always
/// derive `l` from the prime oracle.
pub fn wesolowski_open_with_ell(
    group: &UnknownOrderGroup,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    ell: BigUint,
) -> (WesolowskiProof, Vec<Round>) {
    open_with(group, g, y, t, ell)
}

fn open_with(
    group: &UnknownOrderGroup,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    ell: BigUint,
) -> (WesolowskiProof, Vec<Round>) {
    let (quotient, remainder) = quotient_and_remainder(t, &ell);
    let pi = group.pow(g, &quotient);
    let rounds = vec![Round { prover_message: y.to_bytes(), challenge: ell.clone() }];
    (WesolowskiProof { pi, ell, remainder }, rounds)
}

/// Verifier side: recompute `l` from `(g, y)`, then check
/// `y = pi^l * g^(2^T mod l)`.
pub fn wesolowski_verify(
    group: &UnknownOrderGroup,
    lambda: u32,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    pi: &GroupElement,
    source: &mut ChallengeSource,
) -> Result<bool> {
    let ell = match source.prime(2 * lambda, 0, &ell_input(g, y)) {
        Ok(ell) => ell,
        Err(Error::ChallengeRejected { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(verify_with(group, g, y, t, pi, &ell))
}

/// Verification against a pinned `l`; the test seam's other half.
pub fn wesolowski_verify_with_ell(
    group: &UnknownOrderGroup,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    pi: &GroupElement,
    ell: &BigUint,
) -> bool {
    verify_with(group, g, y, t, pi, ell)
}

fn verify_with(
    group: &UnknownOrderGroup,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    pi: &GroupElement,
    ell: &BigUint,
) -> bool {
    // 2^T mod l on plain integers; only the two powers below touch the group.
    let remainder = BigUint::from(2u32).modpow(&BigUint::from(t), ell);
    let lhs = group.mul(&group.pow(pi, ell), &group.pow(g, &remainder));
    lhs == *y
}

/// Scheme wrapper. The trait-level proof carries `pi` alone; `l` and the
/// remainder are recomputed by every verifier.
#[derive(Debug, Clone, Default)]
pub struct Wesolowski;

impl VdfScheme for Wesolowski {
    fn id(&self) -> SchemeId {
        SchemeId::Wesolowski
    }

    fn proof_kind(&self) -> ProofKind {
        ProofKind::Single
    }

    fn domains_coincide(&self) -> bool {
        true
    }

    fn map_input(&self, params: &VdfParams, x: &[u8]) -> Result<RangeValue> {
        group_map_input(params, x)
    }

    fn decode_range(&self, params: &VdfParams, bytes: &[u8]) -> Result<RangeValue> {
        Ok(RangeValue::Group(decode_residue(params.group()?, bytes)?))
    }

    fn step(&self, params: &VdfParams, v: &RangeValue, steps: u64) -> Result<RangeValue> {
        let group = params.group()?;
        Ok(RangeValue::Group(group.square_chain(v.as_group()?, steps)))
    }

    fn open(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        source: &mut ChallengeSource,
    ) -> Result<OpenOutcome> {
        let group = params.group()?;
        match wesolowski_open(group, params.lambda, input.as_group()?, output.as_group()?, t, source)
        {
            Ok((proof, rounds)) => {
                Ok(OpenOutcome::finished(Proof::single(RangeValue::Group(proof.pi)), rounds))
            }
            Err(Error::ChallengeRejected { reason, .. }) => Ok(OpenOutcome::aborted(vec![], reason)),
            Err(e) => Err(e),
        }
    }

    fn verify(
        &self,
        params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        proof: &Proof,
        source: &mut ChallengeSource,
    ) -> Result<bool> {
        if proof.len() != 1 {
            return Ok(false);
        }
        let pi = match proof.elements[0].as_group() {
            Ok(pi) => pi,
            Err(_) => return Ok(false),
        };
        wesolowski_verify(
            params.group()?,
            params.lambda,
            input.as_group()?,
            output.as_group()?,
            t,
            pi,
            source,
        )
    }
}
