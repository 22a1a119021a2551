//! The halving protocol for proofs of exponentiation.
//!
//! The protocol rests on the identity `z^r * y = (g^r * z)^(2^(T/2))` for
//! `y = g^(2^T)`, `z = g^(2^(T/2))` and any challenge `r`: each round the
//! prover sends the midpoint `z`, a challenge folds the claim to the
//! half-delay instance `(g^r * z, z^r * y, T/2)`, and after `log2 T` rounds
//! the verifier is left with the one-squaring check `y' = g'^2`. Delays are
//! restricted to powers of two so that every fold halves exactly.
//!
//! Verification has two equivalent routes. When challenges are replayed from
//! a transcript the folds never have to materialize: expanding the recursion
//! gives the single relation
//!
//! `g^(2 * r_0...r_{k-1}) * prod_i z_i^(2 * A_i - r_i) = y`,  `A_i = prod_{j>i} r_j`
//!
//! which one signed multi-exponentiation checks with about
//! `sum_i bitlen(r_i)` squarings. In compiled (oracle) mode each challenge
//! hashes the current folded instance, so the verifier walks the folds
//! round by round and pays roughly twice that.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::One;

use crate::error::{Error, Result};
use crate::group::{GroupElement, UnknownOrderGroup};
use crate::hash::encode_fields;
use crate::scheme::{
    ChallengeSource, OpenOutcome, Proof, ProofKind, Round, RangeValue, SchemeId, VdfParams,
    VdfScheme,
};

use super::support::{decode_residue, group_map_input};

/// Oracle input for one round: the current instance `(g, y, z, T)`, length
/// prefixed. The merge operation depends on every round hashing only the
/// *current* folded instance, never the root statement.
fn round_input(g: &GroupElement, y: &GroupElement, z: &GroupElement, t: u64) -> Vec<u8> {
    encode_fields(&[b"pietrzak-round", &g.to_bytes(), &y.to_bytes(), &z.to_bytes(), &t.to_be_bytes()])
}

fn require_power_of_two(t: u64) -> Result<u32> {
    if t == 0 {
        return Err(Error::DelayZero);
    }
    if !t.is_power_of_two() {
        return Err(Error::DelayNotPowerOfTwo(t));
    }
    Ok(t.trailing_zeros())
}

fn open_inner(
    group: &UnknownOrderGroup,
    lambda: u32,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    source: &mut ChallengeSource,
    assert_identity: bool,
) -> Result<OpenOutcome> {
    require_power_of_two(t)?;
    let mut g_cur = g.clone();
    let mut y_cur = y.clone();
    let mut t_cur = t;
    let mut rounds: Vec<Round> = Vec::new();
    let mut midpoints: Vec<GroupElement> = Vec::new();

    while t_cur > 1 {
        let half = t_cur / 2;
        let z = group.square_chain(&g_cur, half);
        let input = round_input(&g_cur, &y_cur, &z, t_cur);
        let r = match source.uniform(lambda, rounds.len(), &input) {
            Ok(r) => r,
            Err(Error::ChallengeRejected { reason, .. }) => {
                return Ok(OpenOutcome::aborted(rounds, reason));
            }
            Err(e) => return Err(e),
        };
        let g_next = group.mul(&group.pow(&g_cur, &r), &z);
        let y_next = group.mul(&group.pow(&z, &r), &y_cur);
        if assert_identity {
            // z^r * y = (g^r * z)^(2^(T/2)) holds for honest values at every
            // recursion level.
            assert_eq!(
                y_next,
                group.square_chain(&g_next, half),
                "halving identity violated at T={t_cur}"
            );
        }
        rounds.push(Round { prover_message: z.to_bytes(), challenge: r });
        midpoints.push(z);
        g_cur = g_next;
        y_cur = y_next;
        t_cur = half;
    }

    let proof = Proof::vector(midpoints.into_iter().map(RangeValue::Group).collect());
    Ok(OpenOutcome::finished(proof, rounds))
}

/// Prover side: emit the `log2 T` midpoints, folding after each challenge.
pub fn pietrzak_open(
    group: &UnknownOrderGroup,
    lambda: u32,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    source: &mut ChallengeSource,
) -> Result<OpenOutcome> {
    open_inner(group, lambda, g, y, t, source, false)
}

/// `pietrzak_open` plus a per-round assertion of the halving identity.
/// Only meaningful on honest `(g, y)`; invariant tests use this entry point.
pub fn pietrzak_open_checked(
    group: &UnknownOrderGroup,
    lambda: u32,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    source: &mut ChallengeSource,
) -> Result<OpenOutcome> {
    open_inner(group, lambda, g, y, t, source, true)
}

/// Signed multi-exponentiation `prod base_i^exp_i`, sharing one squaring
/// chain across all terms. Negative exponents invert the base first (a gcd,
/// not a group operation). Returns `None` when some base is not invertible.
fn multi_pow_signed(
    group: &UnknownOrderGroup,
    terms: &[(GroupElement, BigInt)],
) -> Option<GroupElement> {
    let mut prepared: Vec<(GroupElement, BigUint)> = Vec::with_capacity(terms.len());
    for (base, exp) in terms {
        match exp.sign() {
            Sign::NoSign => continue,
            Sign::Plus => prepared.push((base.clone(), exp.magnitude().clone())),
            Sign::Minus => {
                let inv = group.inv(base).ok()?;
                prepared.push((inv, exp.magnitude().clone()));
            }
        }
    }
    let max_bits = prepared.iter().map(|(_, e)| e.bits()).max().unwrap_or(0);
    let mut acc: Option<GroupElement> = None;
    for i in (0..max_bits).rev() {
        if let Some(a) = acc.take() {
            acc = Some(group.square(&a));
        }
        for (base, exp) in &prepared {
            if exp.bit(i) {
                acc = Some(match acc.take() {
                    None => base.clone(),
                    Some(a) => group.mul(&a, base),
                });
            }
        }
    }
    Some(acc.unwrap_or_else(|| group.one()))
}

/// Verifier side. Challenge replay uses the accumulated single-relation
/// check; oracle-derived challenges force the round-by-round folds.
pub fn pietrzak_verify(
    group: &UnknownOrderGroup,
    lambda: u32,
    g: &GroupElement,
    y: &GroupElement,
    t: u64,
    midpoints: &[GroupElement],
    source: &mut ChallengeSource,
) -> Result<bool> {
    let rounds = require_power_of_two(t)?;
    if midpoints.len() != rounds as usize {
        return Ok(false);
    }
    if rounds == 0 {
        return Ok(*y == group.square(g));
    }

    if source.is_fiat_shamir() {
        // Fold round by round: each challenge hashes the folded instance.
        let mut g_cur = g.clone();
        let mut y_cur = y.clone();
        let mut t_cur = t;
        for (i, z) in midpoints.iter().enumerate() {
            let input = round_input(&g_cur, &y_cur, z, t_cur);
            let r = match source.uniform(lambda, i, &input) {
                Ok(r) => r,
                Err(Error::ChallengeRejected { .. }) => return Ok(false),
                Err(e) => return Err(e),
            };
            g_cur = group.mul(&group.pow(&g_cur, &r), z);
            y_cur = group.mul(&group.pow(z, &r), &y_cur);
            t_cur /= 2;
        }
        return Ok(y_cur == group.square(&g_cur));
    }

    // Replay path: collect the challenges, then check the expanded relation
    // g^(2R) * prod z_i^(2 A_i - r_i) * y^(-1) = 1 in one multi-exponentiation.
    let mut challenges: Vec<BigUint> = Vec::with_capacity(midpoints.len());
    for i in 0..midpoints.len() {
        match source.uniform(lambda, i, &[]) {
            Ok(r) => challenges.push(r),
            Err(Error::ChallengeRejected { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }

    let k = challenges.len();
    // suffix[i] = prod_{j >= i} r_j, so A_i = suffix[i+1] and R = suffix[0].
    let mut suffix = vec![BigInt::one(); k + 1];
    for i in (0..k).rev() {
        suffix[i] = &suffix[i + 1] * BigInt::from(challenges[i].clone());
    }

    let mut terms: Vec<(GroupElement, BigInt)> = Vec::with_capacity(k + 2);
    terms.push((g.clone(), &suffix[0] * 2));
    for (i, z) in midpoints.iter().enumerate() {
        let exponent = &suffix[i + 1] * 2 - BigInt::from(challenges[i].clone());
        terms.push((z.clone(), exponent));
    }
    terms.push((y.clone(), BigInt::from(-1)));

    match multi_pow_signed(group, &terms) {
        Some(product) => Ok(product == group.one()),
        None => Ok(false), // some base was not a unit
    }
}

/// Merge two delay-`T` proofs into the delay-`2T` proof for the composed
/// statement `g -> y` through `h`.
///
/// With `r` drawn for the round `(g, y, h, 2T)`, the folded instance is
/// `u = g^r * h`, `v = h^r * y`, and the merged proof is `h` followed by the
/// proof for `u -> v` at delay `T`. Because every round hashes only its
/// current instance, the result is element-wise identical to a directly
/// computed `2T` proof under the same oracle.
pub fn pietrzak_merge(
    group: &UnknownOrderGroup,
    lambda: u32,
    proof_g_to_h: &[GroupElement],
    proof_h_to_y: &[GroupElement],
    g: &GroupElement,
    h: &GroupElement,
    y: &GroupElement,
    t: u64,
) -> Result<Vec<GroupElement>> {
    require_power_of_two(t)?;
    let mut fs = ChallengeSource::FiatShamir;
    if !pietrzak_verify(group, lambda, g, h, t, proof_g_to_h, &mut fs)? {
        return Err(Error::MergeInputInvalid);
    }
    if !pietrzak_verify(group, lambda, h, y, t, proof_h_to_y, &mut fs)? {
        return Err(Error::MergeInputInvalid);
    }

    let double = 2 * t;
    let input = round_input(g, y, h, double);
    let r = ChallengeSource::FiatShamir.uniform(lambda, 0, &input)?;
    let u = group.mul(&group.pow(g, &r), h);
    let v = group.mul(&group.pow(h, &r), y);

    let outcome = pietrzak_open(group, lambda, &u, &v, t, &mut ChallengeSource::FiatShamir)?;
    let sub = outcome.proof.expect("oracle-driven open cannot abort");
    let mut merged = Vec::with_capacity(sub.elements.len() + 1);
    merged.push(h.clone());
    for element in sub.elements {
        merged.push(match element {
            RangeValue::Group(e) => e,
            _ => unreachable!("halving proofs hold group elements"),
        });
    }
    Ok(merged)
}

fn elements_of(proof: &Proof) -> Result<Vec<GroupElement>> {
    proof.elements.iter().map(|e| Ok(e.as_group()?.clone())).collect()
}

/// Scheme wrapper around the free functions.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pietrzak;

impl VdfScheme for Pietrzak {
    fn id(&self) -> SchemeId {
        SchemeId::Pietrzak
    }

    fn proof_kind(&self) -> ProofKind {
        ProofKind::Vector
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
        pietrzak_open(params.group()?, params.lambda, input.as_group()?, output.as_group()?, t, source)
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
        let midpoints = match elements_of(proof) {
            Ok(m) => m,
            Err(_) => return Ok(false),
        };
        pietrzak_verify(
            params.group()?,
            params.lambda,
            input.as_group()?,
            output.as_group()?,
            t,
            &midpoints,
            source,
        )
    }
}
