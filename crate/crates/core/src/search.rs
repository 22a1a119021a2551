//! Verifiable-line search problems: EOL, EOML, SVL's relaxed form, walkers,
//! solution checkers, the source-shift reduction, and transparent toy
//! families for tests.
//!
//! Successor and position-verifier circuits are opaque callables with a
//! serialization descriptor, not gate-level circuits. Instances are
//! immutable; walks and checks are pure.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::envelope::InstanceDescriptor;
use crate::error::{Error, Result};

/// An `n`-bit vertex. The value is always reduced below `2^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    bits: usize,
    value: BigUint,
}

impl Vertex {
    pub fn new(bits: usize, value: BigUint) -> Result<Self> {
        if bits == 0 {
            return Err(Error::WidthMismatch(0, 1));
        }
        if value.bits() > bits as u64 {
            return Err(Error::WidthMismatch(value.bits() as usize, bits));
        }
        Ok(Vertex { bits, value })
    }

    pub fn zero(bits: usize) -> Self {
        Vertex { bits, value: BigUint::zero() }
    }

    pub fn from_u64(bits: usize, value: u64) -> Result<Self> {
        Self::new(bits, BigUint::from(value))
    }

    /// Decode fixed-width big-endian bytes. The byte length must be exactly
    /// `ceil(bits / 8)` and any padding bits must be clear.
    pub fn from_bytes(bits: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != bits.div_ceil(8) {
            return Err(Error::WidthMismatch(bytes.len() * 8, bits));
        }
        Self::new(bits, BigUint::from_bytes_be(bytes))
    }

    /// Decode big-endian bytes of any length, as long as the value fits.
    pub fn from_bytes_any(bits: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(bits, BigUint::from_bytes_be(bytes))
    }

    pub fn from_hex(bits: usize, hex: &str) -> Result<Self> {
        let value = BigUint::parse_bytes(hex.as_bytes(), 16)
            .ok_or_else(|| Error::Envelope(format!("bad vertex hex `{hex}`")))?;
        Self::new(bits, value)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        let digits = self.value.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => Some(digits[0]),
            _ => None,
        }
    }

    /// Fixed-width big-endian encoding (`ceil(bits/8)` bytes).
    pub fn to_bytes(&self) -> Vec<u8> {
        let width = self.bits.div_ceil(8);
        let raw = self.value.to_bytes_be();
        let mut out = vec![0u8; width - raw.len()];
        out.extend_from_slice(&raw);
        out
    }

    /// Fixed-width hex (`ceil(bits/4)` nibbles).
    pub fn to_hex(&self) -> String {
        let nibbles = self.bits.div_ceil(4);
        format!("{:0>width$x}", self.value, width = nibbles)
    }

    pub fn xor(&self, other: &Vertex) -> Vertex {
        assert_eq!(self.bits, other.bits, "xor across widths");
        Vertex { bits: self.bits, value: &self.value ^ &other.value }
    }
}

pub type SuccessorFn = dyn Fn(&Vertex) -> Vertex + Send + Sync;
pub type VerifierFn = dyn Fn(&Vertex, u64) -> bool + Send + Sync;
pub type PositionFn = dyn Fn(u64) -> Vertex + Send + Sync;

/// A relaxed sink-of-verifiable-line instance `(S, V, v0, T)`.
///
/// Honest instances satisfy the promise `V(v, i) = 1 iff v = S^i(v0)`;
/// derived instances may declare a budget of tolerated false positives.
/// Honest families also expose a trusted position oracle so the false
/// positive check does not have to walk.
#[derive(Clone)]
pub struct RsvlInstance {
    n: usize,
    t: u64,
    v0: Vertex,
    successor: Arc<SuccessorFn>,
    verifier: Arc<VerifierFn>,
    position_oracle: Option<Arc<PositionFn>>,
    walk_budget: u64,
    false_positive_budget: u64,
    descriptor: InstanceDescriptor,
}

impl std::fmt::Debug for RsvlInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RsvlInstance")
            .field("n", &self.n)
            .field("t", &self.t)
            .field("v0", &self.v0.to_hex())
            .field("family", &self.descriptor.family)
            .finish()
    }
}

impl RsvlInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        t: u64,
        v0: Vertex,
        successor: Arc<SuccessorFn>,
        verifier: Arc<VerifierFn>,
        position_oracle: Option<Arc<PositionFn>>,
        false_positive_budget: u64,
        descriptor: InstanceDescriptor,
    ) -> Result<Self> {
        if v0.bits() != n {
            return Err(Error::WidthMismatch(v0.bits(), n));
        }
        if t == 0 || (n < 64 && t > 1u64 << n) {
            return Err(Error::PositionOutOfRange(t, if n < 64 { 1u64 << n } else { u64::MAX }));
        }
        Ok(RsvlInstance {
            n,
            t,
            walk_budget: t,
            v0,
            successor,
            verifier,
            position_oracle,
            false_positive_budget,
            descriptor,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn source(&self) -> &Vertex {
        &self.v0
    }

    pub fn false_positive_budget(&self) -> u64 {
        self.false_positive_budget
    }

    pub fn descriptor(&self) -> &InstanceDescriptor {
        &self.descriptor
    }

    pub fn successor(&self, v: &Vertex) -> Vertex {
        (self.successor)(v)
    }

    /// `S^i(v0)` by `i` sequential applications of the successor.
    pub fn walk(&self, i: u64) -> Result<Vertex> {
        if i > self.t {
            return Err(Error::PositionOutOfRange(i, self.t));
        }
        let mut v = self.v0.clone();
        for _ in 0..i {
            v = (self.successor)(&v);
        }
        Ok(v)
    }

    /// The position verifier circuit `V(v, i)`.
    pub fn verify_position(&self, v: &Vertex, i: u64) -> bool {
        if v.bits() != self.n || i == 0 || i > self.t {
            return false;
        }
        (self.verifier)(v, i)
    }

    /// The line position ground truth: trusted oracle when the family ships
    /// one, otherwise a budget-capped walk.
    pub fn ground_truth(&self, i: u64) -> Result<Vertex> {
        if i > self.t {
            return Err(Error::PositionOutOfRange(i, self.t));
        }
        if let Some(oracle) = &self.position_oracle {
            return Ok(oracle(i));
        }
        if i > self.walk_budget {
            return Err(Error::WalkBudgetExceeded { budget: self.walk_budget, position: i });
        }
        self.walk(i)
    }

    pub fn check_solution(&self, candidate: &RsvlSolution) -> Result<bool> {
        match candidate {
            RsvlSolution::Sink(v) => Ok(self.verify_position(v, self.t)),
            RsvlSolution::FalsePositive(v, i) => {
                if *i == 0 || *i > self.t {
                    return Ok(false);
                }
                if !self.verify_position(v, *i) {
                    return Ok(false);
                }
                Ok(*v != self.ground_truth(*i)?)
            }
        }
    }
}

/// Either the sink at distance `T`, or an off-line vertex the verifier
/// wrongly accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RsvlSolution {
    Sink(Vertex),
    FalsePositive(Vertex, u64),
}

/// Transparent linear-congruential family: `S(v) = v + c (mod 2^n)` with a
/// closed-form position verifier.
///
/// INSECURE by construction: the closed form evaluates any position in one
/// step, so the family has no sequentiality whatsoever. It exists to make
/// promise sweeps and reduction tests exhaustively checkable.
pub fn toy_linear_instance(n: usize, c: u64, v0: Vertex, t: u64) -> Result<RsvlInstance> {
    toy_linear_planted(n, c, v0, t, Vec::new())
}

/// The toy family with deliberately planted false positives, used to
/// exercise the relaxed clause and the adversary-transfer tests.
pub fn toy_linear_planted(
    n: usize,
    c: u64,
    v0: Vertex,
    t: u64,
    planted: Vec<(Vertex, u64)>,
) -> Result<RsvlInstance> {
    if n > 64 {
        return Err(Error::WidthMismatch(n, 64));
    }
    if v0.bits() != n {
        return Err(Error::WidthMismatch(v0.bits(), n));
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let start = v0.to_u64().expect("width checked");
    let stride = c & mask;
    let budget = planted.len() as u64;
    let planted_pairs: Arc<Vec<(u64, u64)>> = Arc::new(
        planted.iter().map(|(v, i)| (v.to_u64().expect("width checked"), *i)).collect(),
    );

    let successor = Arc::new(move |v: &Vertex| {
        let raw = v.to_u64().expect("toy widths fit u64");
        Vertex::from_u64(n, raw.wrapping_add(stride) & mask).expect("masked")
    });
    let on_line = move |v: u64, i: u64| v == start.wrapping_add(stride.wrapping_mul(i)) & mask;
    let planted_for_verifier = Arc::clone(&planted_pairs);
    let verifier = Arc::new(move |v: &Vertex, i: u64| {
        let raw = v.to_u64().expect("width checked by instance");
        on_line(raw, i) || planted_for_verifier.iter().any(|&(pv, pi)| pv == raw && pi == i)
    });
    let position_oracle = Arc::new(move |i: u64| {
        Vertex::from_u64(n, start.wrapping_add(stride.wrapping_mul(i)) & mask).expect("masked")
    });

    let descriptor = InstanceDescriptor {
        family: if planted_pairs.is_empty() { "toy_linear".into() } else { "toy_linear_planted".into() },
        n,
        t,
        v0_hex: v0.to_hex(),
        params: serde_json::json!({
            "c": stride,
            "insecure": true,
            "planted": planted_pairs.iter().map(|&(v, i)| serde_json::json!([v, i])).collect::<Vec<_>>(),
        }),
    };

    RsvlInstance::new(n, t, v0, successor, verifier, Some(position_oracle), budget, descriptor)
}

/// Source-shift: rebase an instance so the designated source is `0^n`.
///
/// Uses the corrected form `S'(v) = S(v XOR v0) XOR v0`,
/// `V'(v, i) = V(v XOR v0, i)`, under which `walk'(i) = walk(i) XOR v0` and
/// solutions biject by XOR with `v0`.
pub fn shift_source(instance: &RsvlInstance) -> RsvlInstance {
    let v0 = instance.source().clone();
    let n = instance.n();
    let inner_succ = Arc::clone(&instance.successor);
    let inner_verify = Arc::clone(&instance.verifier);
    let v0_s = v0.clone();
    let successor: Arc<SuccessorFn> =
        Arc::new(move |v: &Vertex| inner_succ(&v.xor(&v0_s)).xor(&v0_s));
    let v0_v = v0.clone();
    let verifier: Arc<VerifierFn> = Arc::new(move |v: &Vertex, i: u64| inner_verify(&v.xor(&v0_v), i));
    let position_oracle = instance.position_oracle.as_ref().map(|oracle| {
        let inner = Arc::clone(oracle);
        let v0_o = v0.clone();
        Arc::new(move |i: u64| inner(i).xor(&v0_o)) as Arc<PositionFn>
    });

    let descriptor = InstanceDescriptor {
        family: "shifted".into(),
        n,
        t: instance.t(),
        v0_hex: Vertex::zero(n).to_hex(),
        params: serde_json::json!({ "inner": instance.descriptor() }),
    };

    RsvlInstance {
        n,
        t: instance.t(),
        v0: Vertex::zero(n),
        successor,
        verifier,
        position_oracle,
        walk_budget: instance.walk_budget,
        false_positive_budget: instance.false_positive_budget,
        descriptor,
    }
}

/// An end-of-line instance `(S, P)` with the designated source `0^n`.
#[derive(Clone)]
pub struct EolInstance {
    pub n: usize,
    successor: Arc<SuccessorFn>,
    predecessor: Arc<SuccessorFn>,
}

impl EolInstance {
    pub fn new(n: usize, successor: Arc<SuccessorFn>, predecessor: Arc<SuccessorFn>) -> Result<Self> {
        let zero = Vertex::zero(n);
        // P(0^n) = 0^n and S(0^n) != 0^n are the instance well-formedness
        // conditions from the problem definition.
        if predecessor(&zero) != zero || successor(&zero) == zero {
            return Err(Error::Envelope("not a valid end-of-line instance".into()));
        }
        Ok(EolInstance { n, successor, predecessor })
    }

    pub fn successor(&self, v: &Vertex) -> Vertex {
        (self.successor)(v)
    }

    pub fn predecessor(&self, v: &Vertex) -> Vertex {
        (self.predecessor)(v)
    }
}

/// `1` iff `P(S(v)) != v`, or `S(P(v)) != v` with `v != 0^n`.
pub fn check_eol_solution(instance: &EolInstance, v: &Vertex) -> bool {
    if v.bits() != instance.n {
        return false;
    }
    let zero = Vertex::zero(instance.n);
    let sink = instance.predecessor(&instance.successor(v)) != *v;
    let source = instance.successor(&instance.predecessor(v)) != *v && *v != zero;
    sink || source
}

/// An end-of-metered-line instance: `(S, P)` plus the odometer circuit `M`.
#[derive(Clone)]
pub struct EomlInstance {
    pub eol: EolInstance,
    meter: Arc<dyn Fn(&Vertex) -> u128 + Send + Sync>,
}

impl EomlInstance {
    pub fn new(eol: EolInstance, meter: Arc<dyn Fn(&Vertex) -> u128 + Send + Sync>) -> Result<Self> {
        if meter(&Vertex::zero(eol.n)) != 1 {
            return Err(Error::Envelope("odometer must be 1 at the source".into()));
        }
        Ok(EomlInstance { eol, meter })
    }

    pub fn meter(&self, v: &Vertex) -> u128 {
        (self.meter)(v)
    }
}

/// The three solution clauses: end of line, false source, miscount.
pub fn check_eoml_solution(instance: &EomlInstance, v: &Vertex) -> bool {
    if v.bits() != instance.eol.n {
        return false;
    }
    let zero = Vertex::zero(instance.eol.n);
    if check_eol_solution(&instance.eol, v) {
        return true;
    }
    let m_v = instance.meter(v);
    if *v != zero && m_v == 1 {
        return true; // false source
    }
    let miscount_forward = m_v > 0 && {
        let next = instance.eol.successor(v);
        instance.meter(&next).wrapping_sub(m_v) != 1
    };
    let miscount_backward = m_v > 1 && {
        let prev = instance.eol.predecessor(v);
        m_v.wrapping_sub(instance.meter(&prev)) != 1
    };
    miscount_forward || miscount_backward
}

/// A single directed line `0 -> 1 -> ... -> length` over `n`-bit vertices;
/// everything off the line self-loops.
pub fn single_line_eol(n: usize, length: u64) -> Result<EolInstance> {
    if n > 32 || length == 0 || length >= 1u64 << n {
        return Err(Error::PositionOutOfRange(length, 1u64 << n.min(32)));
    }
    let successor = Arc::new(move |v: &Vertex| {
        let raw = v.to_u64().expect("toy width");
        if raw < length {
            Vertex::from_u64(n, raw + 1).expect("in range")
        } else {
            v.clone()
        }
    });
    let predecessor = Arc::new(move |v: &Vertex| {
        let raw = v.to_u64().expect("toy width");
        if raw > 0 && raw <= length {
            Vertex::from_u64(n, raw - 1).expect("in range")
        } else {
            v.clone()
        }
    });
    EolInstance::new(n, successor, predecessor)
}

/// The honest metered line over the same graph: `M = position + 1` on the
/// line, `0` elsewhere. Optionally plant `M(u) = 1` at an off-line vertex to
/// create a false source.
pub fn metered_line_eoml(n: usize, length: u64, planted_false_source: Option<u64>) -> Result<EomlInstance> {
    let eol = single_line_eol(n, length)?;
    let meter = Arc::new(move |v: &Vertex| {
        let raw = v.to_u64().expect("toy width");
        if raw <= length {
            u128::from(raw) + 1
        } else if planted_false_source == Some(raw) {
            1
        } else {
            0
        }
    });
    EomlInstance::new(eol, meter)
}
