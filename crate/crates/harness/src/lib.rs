//! Benchmarks reproducing the cost shape of the schemes, adversary probes
//! (parallel speedup, brute-force forgery, mutation soundness), and the
//! shared plumbing behind the `vdf` command-line tool.

pub mod bench;
pub mod probe;
pub mod vectors;

use vdf_core::error::{Error, Result};
use vdf_core::group::{PrimeField, UnknownOrderGroup};
use vdf_core::scheme::{Backing, InputMap, Mode, SchemeId, VdfParams};

/// Deterministic setup from a seed: sample the backing structure a scheme
/// needs and record the seed so envelopes can offer trapdoor regeneration.
pub fn setup_params(
    scheme: SchemeId,
    lambda: u32,
    t: u64,
    mode: Mode,
    input_map: Option<InputMap>,
    seed: &[u8],
) -> Result<VdfParams> {
    let backing = match scheme {
        SchemeId::DworkNaor => Backing::Field(PrimeField::sample(lambda, seed)?),
        SchemeId::Rsw | SchemeId::Pietrzak | SchemeId::Wesolowski => {
            Backing::Group(UnknownOrderGroup::sample(lambda, seed)?)
        }
        SchemeId::DerivedFromRsvl => {
            return Err(Error::Envelope(
                "derived schemes are set up from an instance family, not a seed".into(),
            ))
        }
    };
    let input_map = input_map.unwrap_or(match scheme {
        // The time-lock puzzle iterates its own range; the proof-carrying
        // schemes map statements in through the group oracle.
        SchemeId::Rsw => InputMap::Residue,
        _ => InputMap::HashToRange,
    });
    Ok(VdfParams::new(scheme, lambda, t, mode, input_map, backing)?.with_setup_seed(seed))
}

pub(crate) fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("no NaN wall times"));
    samples[samples.len() / 2]
}
