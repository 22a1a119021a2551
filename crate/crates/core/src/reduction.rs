//! Executable constructions between delay functions and verifiable lines.
//!
//! Forward: a permutation scheme (coinciding domains) becomes an instance
//! with `S(u) = Eval(pp, u, 1)`; a general scheme goes through an iterated
//! step function `f` with `f(Eval(pp, x, 0), i) = Eval(pp, x, i)`. In both
//! cases `V(v, i)` runs the scheme's own open + verify for the delay-`i`
//! statement against the labeled source, with a budgeted walk as the
//! fallback for positions the proof system cannot address (the halving
//! protocol only certifies power-of-two delays).
//!
//! Backward: a keyed instance family yields a proof-free permutation scheme
//! with `Eval(x) = S^T(x)` and `Verify = V(y, T)`; composing with an
//! injective one-way map `H` lifts it to arbitrary byte inputs via
//! `Eval(x) = S^T(H(x))`. Any accepted-but-wrong output of the derived
//! scheme is, verbatim, a false positive of the underlying instance.

use std::sync::Arc;

use crate::envelope::{bytes_from_hex, bytes_to_hex, InstanceDescriptor, ParamsEnvelope};
use crate::error::{Error, Result};
use crate::hash::{encode_fields, expand_bits};
use crate::scheme::{
    Backing, ChallengeSource, InputMap, Mode, OpenOutcome, Proof, ProofKind, RangeValue, SchemeId,
    VdfParams, VdfScheme,
};
use crate::schemes::scheme_for;
use crate::search::{PositionFn, RsvlInstance, SuccessorFn, VerifierFn, Vertex};

pub type StepFn = dyn Fn(&RangeValue, u64) -> Result<RangeValue> + Send + Sync;
pub type VerifierForFn = dyn Fn(&Vertex) -> Arc<VerifierFn> + Send + Sync;
pub type OracleForFn = dyn Fn(&Vertex) -> Arc<PositionFn> + Send + Sync;

/// An iterated step function `f` with the composition law
/// `f(f(v, a), b) = f(v, a + b)`, which is what makes the successor circuit
/// well defined.
#[derive(Clone)]
pub struct IteratedStep {
    apply: Arc<StepFn>,
}

impl IteratedStep {
    pub fn custom(f: impl Fn(&RangeValue, u64) -> Result<RangeValue> + Send + Sync + 'static) -> Self {
        IteratedStep { apply: Arc::new(f) }
    }

    /// The scheme's own stepper as `f`.
    pub fn from_scheme(scheme: Arc<dyn VdfScheme>, params: Arc<VdfParams>) -> Self {
        IteratedStep {
            apply: Arc::new(move |v, steps| scheme.step(&params, v, steps)),
        }
    }

    pub fn apply(&self, v: &RangeValue, steps: u64) -> Result<RangeValue> {
        (self.apply)(v, steps)
    }

    /// Spot-check the composition law on a probe value.
    pub fn probe_semigroup(&self, probe: &RangeValue, pairs: &[(u64, u64)]) -> Result<()> {
        if self.apply(probe, 0)? != *probe {
            return Err(Error::SemigroupViolation(0, 0));
        }
        for &(a, b) in pairs {
            let stepped = self.apply(&self.apply(probe, a)?, b)?;
            let direct = self.apply(probe, a + b)?;
            if stepped != direct {
                return Err(Error::SemigroupViolation(a, b));
            }
        }
        Ok(())
    }
}

fn encode_vertex(width: usize, value: &RangeValue) -> Vertex {
    Vertex::from_bytes_any(width, &value.to_bytes()).expect("range values fit the declared width")
}

/// `V(v, i)`: run the scheme's open + verify for the delay-`i` statement.
/// Errors at query time mean rejection; errors worth surfacing show up when
/// the instance is constructed, via the honest smoke check.
fn position_check(
    scheme: &Arc<dyn VdfScheme>,
    params: &VdfParams,
    source_value: &RangeValue,
    candidate: &RangeValue,
    i: u64,
    stepper: &IteratedStep,
) -> Result<bool> {
    match scheme.open(params, source_value, candidate, i, &mut ChallengeSource::FiatShamir) {
        Ok(OpenOutcome { proof: Some(proof), .. }) => {
            scheme.verify(params, source_value, candidate, i, &proof, &mut ChallengeSource::FiatShamir)
        }
        Ok(OpenOutcome { proof: None, .. }) => Ok(false),
        // The halving protocol cannot certify this position; compare against
        // the walked ground truth instead (budget: the position itself).
        Err(Error::DelayNotPowerOfTwo(_)) => Ok(stepper.apply(source_value, i)? == *candidate),
        Err(e) => Err(e),
    }
}

fn derived_instance(
    scheme: Arc<dyn VdfScheme>,
    params: Arc<VdfParams>,
    source_value: RangeValue,
    stepper: IteratedStep,
    construction: &str,
    x: &[u8],
) -> Result<RsvlInstance> {
    let width = params.range_width_bits();
    let v0 = encode_vertex(width, &source_value);

    // Smoke-check V on the first honest position so that construction-time
    // problems (a missing trapdoor, mismatched params) surface as errors.
    let first = stepper.apply(&source_value, 1)?;
    if !position_check(&scheme, &params, &source_value, &first, 1, &stepper)? {
        return Err(Error::Envelope("derived verifier rejects the first honest position".into()));
    }

    let succ_scheme = Arc::clone(&scheme);
    let succ_params = Arc::clone(&params);
    let succ_stepper = stepper.clone();
    let successor: Arc<SuccessorFn> = Arc::new(move |v: &Vertex| {
        match succ_scheme.decode_range(&succ_params, &v.to_bytes()) {
            Ok(value) => match succ_stepper.apply(&value, 1) {
                Ok(next) => encode_vertex(v.bits(), &next),
                Err(_) => v.clone(),
            },
            // Off-line garbage has no successor semantics; park it.
            Err(_) => v.clone(),
        }
    });

    let ver_scheme = Arc::clone(&scheme);
    let ver_params = Arc::clone(&params);
    let ver_source = source_value.clone();
    let ver_stepper = stepper.clone();
    let verifier: Arc<VerifierFn> = Arc::new(move |v: &Vertex, i: u64| {
        let candidate = match ver_scheme.decode_range(&ver_params, &v.to_bytes()) {
            Ok(c) => c,
            Err(_) => return false,
        };
        position_check(&ver_scheme, &ver_params, &ver_source, &candidate, i, &ver_stepper)
            .unwrap_or(false)
    });

    let descriptor = InstanceDescriptor {
        family: "vdf_derived".into(),
        n: width,
        t: params.t,
        v0_hex: v0.to_hex(),
        params: serde_json::json!({
            "construction": construction,
            "vdf": ParamsEnvelope::of(&params, None),
            "x_hex": bytes_to_hex(x),
        }),
    };

    RsvlInstance::new(
        width,
        params.t,
        v0,
        successor,
        verifier,
        None,
        u64::from(params.lambda),
        descriptor,
    )
}

/// Algorithms "S from Eval" / "V from Eval" for schemes whose input and
/// output domains coincide: `v0 = x`, `S(u) = Eval(pp, u, 1)`.
pub fn perm_vdf_to_rsvl(
    scheme: Arc<dyn VdfScheme>,
    params: Arc<VdfParams>,
    x: &[u8],
) -> Result<RsvlInstance> {
    if !scheme.domains_coincide() {
        return Err(Error::DomainsDistinct);
    }
    let source_value = scheme.decode_range(&params, x)?;
    let stepper = IteratedStep::from_scheme(Arc::clone(&scheme), Arc::clone(&params));
    derived_instance(scheme, params, source_value, stepper, "permutation", x)
}

/// The general construction: `v0 = Eval(pp, x, 0)` maps the input into the
/// range, and the successor is `S(u) = f(u, 1)`. The composition law of `f`
/// is probed before the instance is built.
pub fn general_vdf_to_rsvl(
    scheme: Arc<dyn VdfScheme>,
    params: Arc<VdfParams>,
    x: &[u8],
    f: IteratedStep,
) -> Result<RsvlInstance> {
    let source_value = scheme.map_input(&params, x)?;
    f.probe_semigroup(&source_value, &[(0, 1), (1, 0), (1, 1), (1, 2), (2, 3)])?;
    derived_instance(scheme, params, source_value, f, "general", x)
}

/// A keyed family of instances sharing one successor circuit, one per
/// source vertex. `Setup` of the derived scheme samples nothing heavier
/// than this handle, which keeps it polynomial in `(lambda, log T)`.
#[derive(Clone)]
pub struct RsvlFamily {
    pub n: usize,
    pub t: u64,
    successor: Arc<SuccessorFn>,
    verifier_for: Arc<VerifierForFn>,
    oracle_for: Option<Arc<OracleForFn>>,
    false_positive_budget: u64,
    family_params: serde_json::Value,
    family_name: String,
}

impl RsvlFamily {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        t: u64,
        successor: Arc<SuccessorFn>,
        verifier_for: Arc<VerifierForFn>,
        oracle_for: Option<Arc<OracleForFn>>,
        false_positive_budget: u64,
        family_name: String,
        family_params: serde_json::Value,
    ) -> Self {
        RsvlFamily {
            n,
            t,
            successor,
            verifier_for,
            oracle_for,
            false_positive_budget,
            family_params,
            family_name,
        }
    }

    pub fn successor(&self, v: &Vertex) -> Vertex {
        (self.successor)(v)
    }

    /// The instance keyed by `source`.
    pub fn instance_for(&self, source: &Vertex) -> Result<RsvlInstance> {
        let descriptor = InstanceDescriptor {
            family: self.family_name.clone(),
            n: self.n,
            t: self.t,
            v0_hex: source.to_hex(),
            params: self.family_params.clone(),
        };
        RsvlInstance::new(
            self.n,
            self.t,
            source.clone(),
            Arc::clone(&self.successor),
            (self.verifier_for)(source),
            self.oracle_for.as_ref().map(|o| o(source)),
            self.false_positive_budget,
            descriptor,
        )
    }
}

/// The toy linear family, keyed by source.
pub fn toy_linear_family(n: usize, c: u64, t: u64) -> Result<RsvlFamily> {
    if n > 64 {
        return Err(Error::WidthMismatch(n, 64));
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let stride = c & mask;
    let successor: Arc<SuccessorFn> = Arc::new(move |v: &Vertex| {
        Vertex::from_u64(n, v.to_u64().expect("toy width").wrapping_add(stride) & mask).expect("masked")
    });
    let verifier_for: Arc<dyn Fn(&Vertex) -> Arc<VerifierFn> + Send + Sync> =
        Arc::new(move |source: &Vertex| {
            let start = source.to_u64().expect("toy width");
            Arc::new(move |v: &Vertex, i: u64| {
                v.to_u64().expect("toy width")
                    == start.wrapping_add(stride.wrapping_mul(i)) & mask
            })
        });
    let oracle_for: Arc<dyn Fn(&Vertex) -> Arc<PositionFn> + Send + Sync> =
        Arc::new(move |source: &Vertex| {
            let start = source.to_u64().expect("toy width");
            Arc::new(move |i: u64| {
                Vertex::from_u64(n, start.wrapping_add(stride.wrapping_mul(i)) & mask)
                    .expect("masked")
            })
        });
    Ok(RsvlFamily::new(
        n,
        t,
        successor,
        verifier_for,
        Some(oracle_for),
        0,
        "toy_linear".into(),
        serde_json::json!({ "c": stride, "insecure": true }),
    ))
}

/// An injective map `H` from byte strings into `n`-bit vertices.
/// One-wayness is an assumption, not a testable property; injectivity is
/// checked against explicit probe domains.
#[derive(Clone)]
pub struct InjectiveOwf {
    pub n: usize,
    map: Arc<dyn Fn(&[u8]) -> Vertex + Send + Sync>,
    pub kind: String,
}

impl InjectiveOwf {
    /// Width-exact inputs pass through unchanged (reduces the general
    /// construction to the permutation one); anything else is absorbed.
    pub fn identity(n: usize) -> Self {
        InjectiveOwf {
            n,
            map: Arc::new(move |x: &[u8]| match Vertex::from_bytes(n, x) {
                Ok(v) => v,
                Err(_) => absorb(n, x),
            }),
            kind: "identity".into(),
        }
    }

    /// Truncated hash. Injective only on sparse domains (a random map into
    /// `2^n` buckets collides on any domain approaching `2^(n/2)`), so
    /// always pair it with an explicit injectivity sweep.
    pub fn truncated_hash(n: usize, salt: &[u8]) -> Self {
        let salt = salt.to_vec();
        InjectiveOwf {
            n,
            map: Arc::new(move |x: &[u8]| {
                let input = encode_fields(&[b"owf-trunc", &salt, x]);
                Vertex::new(n, expand_bits("OWF:", &input, n as u64)).expect("width pinned")
            }),
            kind: "truncated_hash".into(),
        }
    }

    /// A four-round Feistel network over the two `n/2`-bit halves, keyed by
    /// `key`. Being a permutation of `{0,1}^n`, it is injective on the full
    /// width-exact domain, which a truncated hash can never be.
    pub fn feistel(n: usize, key: &[u8]) -> Result<Self> {
        if n % 2 != 0 || n > 64 {
            return Err(Error::WidthMismatch(n, if n > 64 { 64 } else { n + 1 }));
        }
        let key = key.to_vec();
        let half = n / 2;
        let mask = if half == 64 { u64::MAX } else { (1u64 << half) - 1 };
        let map = move |x: &[u8]| -> Vertex {
            let value = match Vertex::from_bytes(n, x) {
                Ok(v) => v,
                Err(_) => absorb(n, x),
            };
            let raw = value.to_u64().expect("n <= 64");
            let mut left = (raw >> half) & mask;
            let mut right = raw & mask;
            for round in 0u32..4 {
                let input = encode_fields(&[b"feistel", &key, &round.to_be_bytes(), &right.to_be_bytes()]);
                let f = expand_bits("OWF:", &input, half as u64)
                    .to_u64_digits()
                    .first()
                    .copied()
                    .unwrap_or(0);
                let new_right = (left ^ f) & mask;
                left = right;
                right = new_right;
            }
            Vertex::from_u64(n, (left << half) | right).expect("masked")
        };
        Ok(InjectiveOwf { n, map: Arc::new(map), kind: "feistel".into() })
    }

    pub fn apply(&self, x: &[u8]) -> Vertex {
        (self.map)(x)
    }

    /// Exhaustively check injectivity on a probe domain.
    pub fn verify_injective<I>(&self, domain: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<u8>>,
    {
        let mut seen: std::collections::HashMap<Vertex, Vec<u8>> = std::collections::HashMap::new();
        for input in domain {
            let image = self.apply(&input);
            if let Some(previous) = seen.insert(image, input.clone()) {
                if previous != input {
                    return Err(Error::OwfCollision(bytes_to_hex(&previous), bytes_to_hex(&input)));
                }
            }
        }
        Ok(())
    }
}

/// Absorb arbitrary bytes into `n` bits; the non-injective escape hatch for
/// inputs outside the declared domain.
fn absorb(n: usize, x: &[u8]) -> Vertex {
    Vertex::new(n, expand_bits("OWF:", &encode_fields(&[b"absorb", x]), n as u64)).expect("width pinned")
}

/// The permutation scheme derived from an instance family:
/// `Eval(x) = S^T(x)`, `Verify(x, y) = V_x(y, T)`, no proof. The input is
/// implicit to the verifier circuit through the family keying.
#[derive(Clone)]
pub struct DerivedVdf {
    family: Arc<RsvlFamily>,
    owf: Option<InjectiveOwf>,
}

/// Theorem-member construction: a permutation scheme over `{0,1}^n`.
pub fn rsvl_to_perm_vdf(family: RsvlFamily) -> DerivedVdf {
    DerivedVdf { family: Arc::new(family), owf: None }
}

/// The generic variant through an injective one-way map: `X = {0,1}^*`,
/// `Eval(x) = S^T(H(x))`. Collisions on the probe domain reject the
/// construction outright.
pub fn rsvl_to_general_vdf(
    family: RsvlFamily,
    owf: InjectiveOwf,
    probe_domain: &[Vec<u8>],
) -> Result<DerivedVdf> {
    if owf.n != family.n {
        return Err(Error::WidthMismatch(owf.n, family.n));
    }
    owf.verify_injective(probe_domain.iter().cloned())?;
    Ok(DerivedVdf { family: Arc::new(family), owf: Some(owf) })
}

impl DerivedVdf {
    pub fn family(&self) -> &RsvlFamily {
        &self.family
    }

    /// Public parameters for this scheme.
    pub fn params(&self, lambda: u32, mode: Mode) -> Result<VdfParams> {
        let input_map =
            if self.owf.is_some() { InputMap::HashToRange } else { InputMap::Residue };
        VdfParams::new(
            SchemeId::DerivedFromRsvl,
            lambda,
            self.family.t,
            mode,
            input_map,
            Backing::Vertices { n: self.family.n },
        )
    }
}

impl VdfScheme for DerivedVdf {
    fn id(&self) -> SchemeId {
        SchemeId::DerivedFromRsvl
    }

    fn proof_kind(&self) -> ProofKind {
        ProofKind::Empty
    }

    fn domains_coincide(&self) -> bool {
        self.owf.is_none()
    }

    fn map_input(&self, _params: &VdfParams, x: &[u8]) -> Result<RangeValue> {
        match &self.owf {
            Some(h) => Ok(RangeValue::Vertex(h.apply(x))),
            None => Ok(RangeValue::Vertex(Vertex::from_bytes(self.family.n, x)?)),
        }
    }

    fn decode_range(&self, _params: &VdfParams, bytes: &[u8]) -> Result<RangeValue> {
        Ok(RangeValue::Vertex(Vertex::from_bytes(self.family.n, bytes)?))
    }

    fn step(&self, _params: &VdfParams, v: &RangeValue, steps: u64) -> Result<RangeValue> {
        let mut current = v.as_vertex()?.clone();
        for _ in 0..steps {
            current = self.family.successor(&current);
        }
        Ok(RangeValue::Vertex(current))
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
        _params: &VdfParams,
        input: &RangeValue,
        output: &RangeValue,
        t: u64,
        proof: &Proof,
        _source: &mut ChallengeSource,
    ) -> Result<bool> {
        if !proof.is_empty() {
            return Ok(false);
        }
        let instance = self.family.instance_for(input.as_vertex()?)?;
        Ok(instance.verify_position(output.as_vertex()?, t))
    }
}

/// Rebuild an instance from its serialized descriptor. Derived descriptors
/// embed the full parameter envelope, so they round-trip; schemes whose
/// verifier needs the trapdoor require the setup seed in that envelope.
pub fn instance_from_descriptor(descriptor: &InstanceDescriptor) -> Result<RsvlInstance> {
    match descriptor.family.as_str() {
        "toy_linear" | "toy_linear_planted" => {
            let c = descriptor.params["c"]
                .as_u64()
                .ok_or_else(|| Error::Envelope("toy_linear descriptor missing `c`".into()))?;
            let v0 = Vertex::from_hex(descriptor.n, &descriptor.v0_hex)?;
            let planted = descriptor.params["planted"]
                .as_array()
                .map(|entries| {
                    entries
                        .iter()
                        .map(|e| {
                            let v = e[0].as_u64().ok_or_else(|| {
                                Error::Envelope("bad planted vertex".into())
                            })?;
                            let i = e[1]
                                .as_u64()
                                .ok_or_else(|| Error::Envelope("bad planted index".into()))?;
                            Ok((Vertex::from_u64(descriptor.n, v)?, i))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?
                .unwrap_or_default();
            crate::search::toy_linear_planted(descriptor.n, c, v0, descriptor.t, planted)
        }
        "shifted" => {
            let inner: InstanceDescriptor = serde_json::from_value(descriptor.params["inner"].clone())?;
            Ok(crate::search::shift_source(&instance_from_descriptor(&inner)?))
        }
        "vdf_derived" => {
            let envelope: ParamsEnvelope = serde_json::from_value(descriptor.params["vdf"].clone())?;
            let needs_trapdoor = envelope.scheme == SchemeId::Rsw;
            let params = Arc::new(envelope.to_params(needs_trapdoor)?);
            let scheme = scheme_for(envelope.scheme)?;
            let x = bytes_from_hex(
                descriptor.params["x_hex"]
                    .as_str()
                    .ok_or_else(|| Error::Envelope("vdf_derived descriptor missing x_hex".into()))?,
            )?;
            match descriptor.params["construction"].as_str() {
                Some("permutation") => perm_vdf_to_rsvl(scheme, params, &x),
                Some("general") => {
                    let f = IteratedStep::from_scheme(Arc::clone(&scheme), Arc::clone(&params));
                    general_vdf_to_rsvl(scheme, params, &x, f)
                }
                other => Err(Error::Envelope(format!("unknown construction {other:?}"))),
            }
        }
        other => Err(Error::Envelope(format!("unknown instance family `{other}`"))),
    }
}
