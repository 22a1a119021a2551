//! Residue arithmetic over RSA groups of unknown order and prime fields.
//!
//! Elements are canonical reduced residues and stay immutable once built;
//! all arithmetic goes through the owning group or field so that every
//! squaring and multiplication lands in the thread's [`crate::counter`]
//! tallies. The group keeps the totient trapdoor private: only
//! [`UnknownOrderGroup::totient_oracle`] can reach it, and the serialized
//! descriptor never carries it.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::counter::{count_multiplication, count_reduction, count_squaring};
use crate::error::{Error, Result};
use crate::hash::{encode_fields, expand_bits, is_prime, SeedStream, TAG_GROUP};

fn fingerprint(domain: &str, modulus: &BigUint) -> u64 {
    let bytes = expand_bits(domain, &modulus.to_bytes_be(), 64);
    let digits = bytes.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

/// An RSA group `(Z/NZ)^*` whose order is hidden from everyone without the
/// trapdoor `phi(N)`.
#[derive(Debug, Clone)]
pub struct UnknownOrderGroup {
    modulus: BigUint,
    bits: u64,
    trapdoor: Option<BigUint>,
    tag: u64,
}

/// A canonical residue in `[1, N)` tagged with the group that owns it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    value: BigUint,
    tag: u64,
}

impl GroupElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Minimal big-endian byte encoding, the form every oracle hashes.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.value.to_bytes_be()
    }

    pub fn to_hex(&self) -> String {
        format!("{:x}", self.value)
    }
}

impl UnknownOrderGroup {
    /// Build a group from an explicit prime pair. The trapdoor is retained.
    pub fn from_primes(p: &BigUint, q: &BigUint) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q.to_string()));
        }
        if p == q {
            return Err(Error::InvalidModulus);
        }
        let modulus = p * q;
        if modulus.is_even() || modulus < BigUint::from(15u32) {
            return Err(Error::InvalidModulus);
        }
        let trapdoor = (p - 1u32) * (q - 1u32);
        let tag = fingerprint("group-tag:", &modulus);
        Ok(UnknownOrderGroup { bits: modulus.bits(), modulus, trapdoor: Some(trapdoor), tag })
    }

    /// Deterministically sample an RSA modulus of roughly `lambda` bits from
    /// `seed`: two primes of `lambda/2` bits each, found by hash-then-count.
    /// The search never fails silently; it keeps extending the counter until
    /// a prime turns up.
    pub fn sample(lambda: u32, seed: &[u8]) -> Result<Self> {
        if lambda < 8 {
            return Err(Error::LambdaTooSmall(lambda, 8));
        }
        if seed.is_empty() {
            return Err(Error::EmptyInput);
        }
        let half = lambda / 2;
        let p = Self::sample_prime(half, seed, "rsa-p");
        let mut stream = 0u32;
        let mut q = Self::sample_prime(half, &encode_fields(&[seed, &stream.to_be_bytes()]), "rsa-q");
        while q == p {
            stream += 1;
            q = Self::sample_prime(half, &encode_fields(&[seed, &stream.to_be_bytes()]), "rsa-q");
        }
        Self::from_primes(&p, &q)
    }

    fn sample_prime(bits: u32, seed: &[u8], role: &str) -> BigUint {
        let top = BigUint::one() << (bits - 1);
        let mut counter = 0u64;
        loop {
            let input = encode_fields(&[role.as_bytes(), &counter.to_be_bytes(), seed]);
            let candidate = expand_bits("prime-sample:", &input, u64::from(bits)) | &top | BigUint::one();
            if is_prime(&candidate) {
                return candidate;
            }
            counter += 1;
        }
    }

    /// The public side of a group: modulus only, factorization unknown.
    pub fn from_modulus(modulus: BigUint) -> Result<Self> {
        if modulus.is_even() || modulus < BigUint::from(15u32) {
            return Err(Error::InvalidModulus);
        }
        let tag = fingerprint("group-tag:", &modulus);
        Ok(UnknownOrderGroup { bits: modulus.bits(), modulus, trapdoor: None, tag })
    }

    /// Attach an externally supplied totient, e.g. from a stored test
    /// vector. The claim is probed by checking `g^phi = 1` on sampled units
    /// before it is accepted.
    pub fn from_modulus_with_totient(modulus: BigUint, phi: BigUint) -> Result<Self> {
        let mut group = Self::from_modulus(modulus)?;
        let mut stream = SeedStream::new("totient-probe", &group.modulus.to_bytes_be());
        for _ in 0..4 {
            let unit = sample_unit(&group, &mut stream);
            if group.pow(&unit, &phi) != group.one() {
                return Err(Error::Envelope("claimed totient fails g^phi = 1".into()));
            }
        }
        group.trapdoor = Some(phi);
        Ok(group)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn has_trapdoor(&self) -> bool {
        self.trapdoor.is_some()
    }

    /// The only way to reach `phi(N)`. Prover and verifier code must call
    /// this by name, so a grep for `totient_oracle` finds every secret use.
    pub fn totient_oracle(&self) -> Result<&BigUint> {
        self.trapdoor.as_ref().ok_or(Error::TrapdoorMissing)
    }

    /// A copy with the trapdoor erased, as shipped to untrusted parties.
    pub fn without_trapdoor(&self) -> Self {
        UnknownOrderGroup { trapdoor: None, ..self.clone() }
    }

    /// Canonicalize `value` into `[1, N)`. Zero residues are rejected; unit
    /// checking is left to the callers that require it.
    pub fn element(&self, value: BigUint) -> Result<GroupElement> {
        count_reduction();
        let reduced = value % &self.modulus;
        if reduced.is_zero() {
            return Err(Error::NotAUnit);
        }
        Ok(GroupElement { value: reduced, tag: self.tag })
    }

    pub fn element_from_u64(&self, value: u64) -> Result<GroupElement> {
        self.element(BigUint::from(value))
    }

    pub fn one(&self) -> GroupElement {
        GroupElement { value: BigUint::one(), tag: self.tag }
    }

    pub fn is_unit(&self, e: &GroupElement) -> bool {
        e.value.gcd(&self.modulus).is_one()
    }

    fn check(&self, e: &GroupElement) {
        assert_eq!(e.tag, self.tag, "element used with a foreign group");
    }

    /// The random oracle `H_G`: hash-and-reject until the residue is a unit.
    pub fn hash_to_group(&self, input: &[u8]) -> Result<GroupElement> {
        if input.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut counter = 0u64;
        loop {
            let framed = encode_fields(&[&counter.to_be_bytes(), input]);
            // 64 extra bits before the reduction keep the residue near-uniform.
            let wide = expand_bits(TAG_GROUP, &framed, self.bits + 64);
            count_reduction();
            let candidate = wide % &self.modulus;
            if !candidate.is_zero() && candidate.gcd(&self.modulus).is_one() {
                return Ok(GroupElement { value: candidate, tag: self.tag });
            }
            counter += 1;
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.check(a);
        self.check(b);
        count_multiplication();
        count_reduction();
        GroupElement { value: (&a.value * &b.value) % &self.modulus, tag: self.tag }
    }

    pub fn square(&self, a: &GroupElement) -> GroupElement {
        self.check(a);
        count_squaring();
        count_reduction();
        GroupElement { value: (&a.value * &a.value) % &self.modulus, tag: self.tag }
    }

    /// `g^(2^k)` by exactly `k` sequential squarings.
    pub fn square_chain(&self, g: &GroupElement, k: u64) -> GroupElement {
        self.check(g);
        let mut acc = g.clone();
        for _ in 0..k {
            acc = self.square(&acc);
        }
        acc
    }

    /// Square-and-multiply; at most `2 * bitlen(e)` group operations.
    pub fn pow(&self, g: &GroupElement, e: &BigUint) -> GroupElement {
        self.check(g);
        if e.is_zero() {
            return self.one();
        }
        let bits = e.bits();
        let mut acc = g.clone();
        for i in (0..bits - 1).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, g);
            }
        }
        acc
    }

    /// Modular inverse by extended gcd. Costs no group operations.
    pub fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a);
        let inverse = modular_inverse(&a.value, &self.modulus).ok_or(Error::NotAUnit)?;
        Ok(GroupElement { value: inverse, tag: self.tag })
    }
}

pub(crate) fn modular_inverse(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m = BigInt::from(modulus.clone());
    let ext = a.extended_gcd(&m);
    if !ext.gcd.is_one() {
        return None;
    }
    let mut x = ext.x % &m;
    if x < BigInt::zero() {
        x += &m;
    }
    x.to_biguint()
}

/// A prime field `F_p` with `p = 3 (mod 4)`, as used by the square-root
/// pricing function. Primality is certified at construction.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: BigUint,
    bits: u64,
    tag: u64,
}

/// A canonical residue in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: BigUint,
    tag: u64,
}

impl FieldElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.value.to_bytes_be()
    }

    pub fn to_hex(&self) -> String {
        format!("{:x}", self.value)
    }
}

impl PrimeField {
    pub fn new(p: BigUint) -> Result<Self> {
        if !is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if (&p % 4u32) != BigUint::from(3u32) {
            return Err(Error::FieldNotThreeMod4);
        }
        let tag = fingerprint("field-tag:", &p);
        Ok(PrimeField { bits: p.bits(), p, tag })
    }

    /// Deterministically sample a `bits`-bit prime `p = 3 (mod 4)`.
    pub fn sample(bits: u32, seed: &[u8]) -> Result<Self> {
        if bits < 4 {
            return Err(Error::LambdaTooSmall(bits, 4));
        }
        if seed.is_empty() {
            return Err(Error::EmptyInput);
        }
        let top = BigUint::one() << (bits - 1);
        let mut counter = 0u64;
        loop {
            let input = encode_fields(&[b"field-p", &counter.to_be_bytes(), seed]);
            // Setting the two low bits forces candidate = 3 (mod 4).
            let candidate =
                expand_bits("prime-sample:", &input, u64::from(bits)) | &top | BigUint::from(3u32);
            if is_prime(&candidate) {
                return PrimeField::new(candidate);
            }
            counter += 1;
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn element(&self, value: BigUint) -> FieldElement {
        count_reduction();
        FieldElement { value: value % &self.p, tag: self.tag }
    }

    pub fn element_from_u64(&self, value: u64) -> FieldElement {
        self.element(BigUint::from(value))
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: BigUint::one(), tag: self.tag }
    }

    fn check(&self, e: &FieldElement) {
        assert_eq!(e.tag, self.tag, "element used with a foreign field");
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        count_multiplication();
        count_reduction();
        FieldElement { value: (&a.value * &b.value) % &self.p, tag: self.tag }
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.check(a);
        count_squaring();
        count_reduction();
        FieldElement { value: (&a.value * &a.value) % &self.p, tag: self.tag }
    }

    pub fn square_chain(&self, a: &FieldElement, k: u64) -> FieldElement {
        let mut acc = a.clone();
        for _ in 0..k {
            acc = self.square(&acc);
        }
        acc
    }

    pub fn pow(&self, g: &FieldElement, e: &BigUint) -> FieldElement {
        self.check(g);
        if e.is_zero() {
            return self.one();
        }
        let bits = e.bits();
        let mut acc = g.clone();
        for i in (0..bits - 1).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, g);
            }
        }
        acc
    }

    /// Euler criterion. Zero is not a residue for our purposes.
    pub fn is_quadratic_residue(&self, x: &FieldElement) -> bool {
        self.check(x);
        if x.value.is_zero() {
            return false;
        }
        let exponent = (&self.p - 1u32) >> 1;
        self.pow(x, &exponent).value.is_one()
    }

    /// Hash into `[1, p)`, rejection-sampled like the group oracle.
    pub fn hash_to_field(&self, input: &[u8]) -> Result<FieldElement> {
        if input.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut counter = 0u64;
        loop {
            let framed = encode_fields(&[b"field", &counter.to_be_bytes(), input]);
            let wide = expand_bits(TAG_GROUP, &framed, self.bits + 64);
            count_reduction();
            let candidate = wide % &self.p;
            if !candidate.is_zero() {
                return Ok(FieldElement { value: candidate, tag: self.tag });
            }
            counter += 1;
        }
    }
}

/// Deterministically sample a unit of the group from a seed stream. Test and
/// probe plumbing.
pub fn sample_unit(group: &UnknownOrderGroup, stream: &mut SeedStream) -> GroupElement {
    loop {
        let candidate = stream.next_below(group.modulus());
        if candidate < BigUint::from(2u32) {
            continue;
        }
        if let Ok(e) = group.element(candidate) {
            if group.is_unit(&e) {
                return e;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::measure;

    fn n35() -> UnknownOrderGroup {
        UnknownOrderGroup::from_primes(&BigUint::from(5u32), &BigUint::from(7u32)).unwrap()
    }

    #[test]
    fn toy_group_has_expected_modulus_and_totient() {
        let g = n35();
        assert_eq!(g.modulus(), &BigUint::from(35u32));
        assert_eq!(g.totient_oracle().unwrap(), &BigUint::from(24u32));
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let a = UnknownOrderGroup::sample(32, b"a").unwrap();
        let b = UnknownOrderGroup::sample(32, b"a").unwrap();
        let c = UnknownOrderGroup::sample(32, b"b").unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_ne!(a.modulus(), c.modulus());
        // Construction forces the bit length to lambda give or take one.
        assert!((31..=32).contains(&a.bits()), "got {} bits", a.bits());
    }

    #[test]
    fn sampling_preconditions() {
        assert!(matches!(UnknownOrderGroup::sample(6, b"x"), Err(Error::LambdaTooSmall(..))));
        assert!(matches!(UnknownOrderGroup::sample(32, b""), Err(Error::EmptyInput)));
    }

    #[test]
    fn square_chain_matches_hand_trace() {
        let g = n35();
        let two = g.element_from_u64(2).unwrap();
        // 2 -> 4 -> 16 -> 256 = 11 (mod 35)
        assert_eq!(g.square_chain(&two, 3).value(), &BigUint::from(11u32));
        assert_eq!(g.square_chain(&two, 0), two);
        let one = g.one();
        assert_eq!(g.square_chain(&one, 100), one);
    }

    #[test]
    fn square_chain_counts_exactly_k_squarings() {
        let g = n35();
        let two = g.element_from_u64(2).unwrap();
        let (_, ops) = measure(|| g.square_chain(&two, 17));
        assert_eq!(ops.squarings, 17);
        assert_eq!(ops.multiplications, 0);
    }

    #[test]
    fn pow_hand_values_and_budget() {
        let g = n35();
        let four = g.element_from_u64(4).unwrap();
        assert_eq!(g.pow(&four, &BigUint::from(3u32)).value(), &BigUint::from(29u32));
        assert_eq!(g.pow(&four, &BigUint::from(1u32)), four);
        assert_eq!(g.pow(&four, &BigUint::zero()), g.one());

        let e = BigUint::from(0b1011_0111u32);
        let (_, ops) = measure(|| g.pow(&four, &e));
        assert!(ops.group_ops() <= 2 * e.bits());
    }

    #[test]
    fn trapdoor_identity_on_toy_group() {
        let g = n35();
        let phi = g.totient_oracle().unwrap().clone();
        let two = g.element_from_u64(2).unwrap();
        for k in 0..12u64 {
            let chain = g.square_chain(&two, k);
            let e = BigUint::from(2u32).modpow(&BigUint::from(k), &phi);
            assert_eq!(g.pow(&two, &e), chain, "k={k}");
        }
    }

    #[test]
    fn hash_to_group_outputs_units_deterministically() {
        let g = UnknownOrderGroup::sample(64, b"hash-test").unwrap();
        let a = g.hash_to_group(b"statement").unwrap();
        let b = g.hash_to_group(b"statement").unwrap();
        assert_eq!(a, b);
        assert!(g.is_unit(&a));
        assert!(g.hash_to_group(b"").is_err());
    }

    #[test]
    fn inverse_roundtrips() {
        let g = n35();
        let e = g.element_from_u64(16).unwrap();
        let inv = g.inv(&e).unwrap();
        assert_eq!(g.mul(&e, &inv), g.one());
        // 16^-1 = 11 (mod 35)
        assert_eq!(inv.value(), &BigUint::from(11u32));
        let not_unit = g.element_from_u64(5).unwrap();
        assert!(g.inv(&not_unit).is_err());
    }

    #[test]
    fn field_rejects_bad_moduli() {
        assert!(PrimeField::new(BigUint::from(13u32)).is_err()); // 1 mod 4
        assert!(PrimeField::new(BigUint::from(15u32)).is_err()); // composite
        let f = PrimeField::new(BigUint::from(7u32)).unwrap();
        assert_eq!(f.bits(), 3);
    }

    #[test]
    fn euler_criterion_mod_7() {
        let f = PrimeField::new(BigUint::from(7u32)).unwrap();
        for qr in [1u64, 2, 4] {
            assert!(f.is_quadratic_residue(&f.element_from_u64(qr)), "{qr}");
        }
        for nqr in [0u64, 3, 5, 6] {
            assert!(!f.is_quadratic_residue(&f.element_from_u64(nqr)), "{nqr}");
        }
    }

    #[test]
    fn field_sampling_is_three_mod_four() {
        let f = PrimeField::sample(8, b"s").unwrap();
        assert_eq!(f.modulus() % 4u32, BigUint::from(3u32));
        assert_eq!(f.bits(), 8);
        assert_eq!(f.modulus(), PrimeField::sample(8, b"s").unwrap().modulus());
    }
}
