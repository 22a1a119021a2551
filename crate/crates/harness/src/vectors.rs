//! Executor for the shipped hand-derived test vectors (JSON lines).

use num_bigint::BigUint;

use vdf_core::envelope::{bytes_from_hex, from_hex, VectorLine};
use vdf_core::error::{Error, Result};
use vdf_core::group::{PrimeField, UnknownOrderGroup};
use vdf_core::scheme::{ChallengeSource, SchemeId};
use vdf_core::schemes::{
    dn_verify, pietrzak_verify, rsw_trapdoor_eval, wesolowski_verify, wesolowski_verify_with_ell,
};

/// Run one vector and report whether the observed verdict matches `expect`.
pub fn run_vector_line(line: &VectorLine) -> Result<bool> {
    let accepted = execute(line)?;
    Ok(accepted == (line.expect == 1))
}

fn execute(line: &VectorLine) -> Result<bool> {
    let modulus = from_hex(&line.n_hex)?;
    match line.scheme {
        SchemeId::DworkNaor => {
            let field = PrimeField::new(modulus)?;
            let x = field.element(BigUint::from_bytes_be(&bytes_from_hex(&line.g_hex)?));
            let y = field.element(BigUint::from_bytes_be(&bytes_from_hex(&line.y_hex)?));
            Ok(dn_verify(&field, &x, &y))
        }
        SchemeId::Rsw => {
            let phi_hex = line
                .phi_hex
                .as_ref()
                .ok_or_else(|| Error::Envelope("rsw vectors carry phi_hex".into()))?;
            let group = UnknownOrderGroup::from_modulus_with_totient(modulus, from_hex(phi_hex)?)?;
            let g = group.element(BigUint::from_bytes_be(&bytes_from_hex(&line.g_hex)?))?;
            let y = group.element(BigUint::from_bytes_be(&bytes_from_hex(&line.y_hex)?))?;
            Ok(rsw_trapdoor_eval(&group, &g, line.t)? == y)
        }
        SchemeId::Pietrzak => {
            let group = UnknownOrderGroup::from_modulus(modulus)?;
            let g = group.element(BigUint::from_bytes_be(&bytes_from_hex(&line.g_hex)?))?;
            let y = group.element(BigUint::from_bytes_be(&bytes_from_hex(&line.y_hex)?))?;
            let midpoints = line
                .proof_hex
                .iter()
                .map(|h| group.element(BigUint::from_bytes_be(&bytes_from_hex(h)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut source = match &line.challenges_hex {
                Some(challenges) => ChallengeSource::fixed(
                    challenges.iter().map(|c| from_hex(c)).collect::<Result<Vec<_>>>()?,
                ),
                None => ChallengeSource::FiatShamir,
            };
            // Toy vectors pin tiny challenges; size lambda accordingly.
            let lambda = (group.bits() as u32).max(4);
            pietrzak_verify(&group, lambda, &g, &y, line.t, &midpoints, &mut source)
        }
        SchemeId::Wesolowski => {
            let group = UnknownOrderGroup::from_modulus(modulus)?;
            let g = group.element(BigUint::from_bytes_be(&bytes_from_hex(&line.g_hex)?))?;
            let y = group.element(BigUint::from_bytes_be(&bytes_from_hex(&line.y_hex)?))?;
            let pi_hex = line
                .proof_hex
                .first()
                .ok_or_else(|| Error::Envelope("wesolowski vectors carry one proof element".into()))?;
            let pi = group.element(BigUint::from_bytes_be(&bytes_from_hex(pi_hex)?))?;
            match &line.ell_hex {
                Some(ell) => Ok(wesolowski_verify_with_ell(&group, &g, &y, line.t, &pi, &from_hex(ell)?)),
                None => {
                    let lambda = (group.bits() as u32).max(4);
                    wesolowski_verify(&group, lambda, &g, &y, line.t, &pi, &mut ChallengeSource::FiatShamir)
                }
            }
        }
        SchemeId::DerivedFromRsvl => {
            Err(Error::Envelope("derived schemes have no stored vector form".into()))
        }
    }
}

#[derive(Debug)]
pub struct VectorSummary {
    pub total: usize,
    pub mismatched: Vec<usize>,
}

impl VectorSummary {
    pub fn all_matched(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Run every line of a JSONL vector file.
pub fn run_vector_file(contents: &str) -> Result<VectorSummary> {
    let mut total = 0;
    let mut mismatched = Vec::new();
    for (index, line) in contents.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: VectorLine = serde_json::from_str(line)?;
        total += 1;
        if !run_vector_line(&parsed)? {
            mismatched.push(index + 1);
        }
    }
    Ok(VectorSummary { total, mismatched })
}
