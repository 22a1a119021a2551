//! The four concrete delay functions: square roots over `F_p`, the RSW
//! time-lock puzzle with its trapdoor verifier, the halving protocol with
//! proof-merging, and the single-element proof of exponentiation.

mod dwork_naor;
mod pietrzak;
mod rsw;
mod wesolowski;

pub use dwork_naor::{dn_eval, dn_sample_qr, dn_verify, DworkNaor};
pub use pietrzak::{
    pietrzak_merge, pietrzak_open, pietrzak_open_checked, pietrzak_verify, Pietrzak,
};
pub use rsw::{rsw_eval, rsw_trapdoor_eval, Rsw};
pub use wesolowski::{
    wesolowski_open, wesolowski_open_with_ell, wesolowski_verify, wesolowski_verify_with_ell,
    Wesolowski, WesolowskiProof,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scheme::{SchemeId, VdfScheme};

/// Look up a stateless scheme by id. The derived-from-rSVL scheme carries
/// its family and is constructed through [`crate::reduction`] instead.
pub fn scheme_for(id: SchemeId) -> Result<Arc<dyn VdfScheme>> {
    match id {
        SchemeId::DworkNaor => Ok(Arc::new(DworkNaor)),
        SchemeId::Rsw => Ok(Arc::new(Rsw)),
        SchemeId::Pietrzak => Ok(Arc::new(Pietrzak)),
        SchemeId::Wesolowski => Ok(Arc::new(Wesolowski::default())),
        SchemeId::DerivedFromRsvl => Err(Error::Envelope(
            "derived_from_rsvl schemes are built from an instance family".into(),
        )),
    }
}

pub(crate) mod support {
    use num_bigint::BigUint;

    use crate::error::{Error, Result};
    use crate::group::{GroupElement, UnknownOrderGroup};
    use crate::scheme::{InputMap, RangeValue, VdfParams};

    /// Shared input map for the group-backed schemes: either parse the bytes
    /// as a canonical residue (permutation view) or run them through `H_G`.
    pub fn group_map_input(params: &VdfParams, x: &[u8]) -> Result<RangeValue> {
        let group = params.group()?;
        match params.input_map {
            InputMap::Residue => Ok(RangeValue::Group(decode_residue(group, x)?)),
            InputMap::HashToRange => Ok(RangeValue::Group(group.hash_to_group(x)?)),
        }
    }

    pub fn decode_residue(group: &UnknownOrderGroup, bytes: &[u8]) -> Result<GroupElement> {
        if bytes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let value = BigUint::from_bytes_be(bytes);
        if &value >= group.modulus() {
            return Err(Error::Envelope("residue encoding out of range".into()));
        }
        group.element(value)
    }
}
