//! The RSW time-lock puzzle: `y = g^(2^T) mod N`.
//!
//! Whoever holds `phi(N)` verifies in `O(lambda)` multiplications by
//! reducing the exponent to `e = 2^T mod phi(N)`; everyone else has no
//! option but the `T` sequential squarings. Verification therefore rests on
//! a secret, which is what disqualifies the puzzle as a publicly verifiable
//! delay function and what the proof-carrying schemes fix.

use num_bigint::BigUint;

use crate::error::Result;
use crate::group::{GroupElement, UnknownOrderGroup};
use crate::scheme::{
    ChallengeSource, OpenOutcome, Proof, ProofKind, RangeValue, SchemeId, VdfParams, VdfScheme,
};

use super::support::{decode_residue, group_map_input};

/// The sequential path: exactly `T` squarings.
pub fn rsw_eval(group: &UnknownOrderGroup, g: &GroupElement, t: u64) -> GroupElement {
    group.square_chain(g, t)
}

/// The secret-holder shortcut: `y = g^(2^T mod phi(N))`. Cost is`O(lambda)`
/// multiplications independent of `T`. Errors when the trapdoor is absent.
pub fn rsw_trapdoor_eval(
    group: &UnknownOrderGroup,
    g: &GroupElement,
    t: u64,
) -> Result<GroupElement> {
    let phi = group.totient_oracle()?;
    let reduced = BigUint::from(2u32).modpow(&BigUint::from(t), phi);
    Ok(group.pow(g, &reduced))
}

/// Proof-free scheme wrapper. `verify` is the trapdoor oracle route.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rsw;

impl VdfScheme for Rsw {
    fn id(&self) -> SchemeId {
        SchemeId::Rsw
    }

    fn proof_kind(&self) -> ProofKind {
        ProofKind::Empty
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
        _params: &VdfParams,
        _input: &RangeValue,
        _output: &RangeValue,
        _t: u64,
        _source: &mut ChallengeSource,
    ) -> Result<OpenOutcome> {
        Ok(OpenOutcome::finished(Proof::empty(), Vec::new()))
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
        if !proof.is_empty() {
            return Ok(false);
        }
        let group = params.group()?;
        let expected = rsw_trapdoor_eval(group, input.as_group()?, t)?;
        Ok(expected == *output.as_group()?)
    }
}
