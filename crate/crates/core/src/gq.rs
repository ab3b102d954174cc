//! Guillou-Quisquater protocol with a factoring trapdoor.
//!
//! The statement is `x = (e, N, y)` and the prover shows knowledge of an
//! e-th root of `y` modulo `N`. Holding the factorization of `N` (rather
//! than just the root) lets the prover answer commitments it did not
//! create: an e-th root of any unit is one exponentiation by
//! `d = e^-1 mod phi(N)`. That trapdoor is what realizes oblivious
//! commitments here. Not quantum-immune; this instantiation exists for
//! fast end-to-end testing of the generic transform.
//!
//! Keys are desk scale: toy primes found by trial division, no padding or
//! side-channel considerations.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::sync::OnceLock;

use crate::bits::BitString;
use crate::error::SigmaError;
use crate::oracle::shake256;
use crate::sigma::{InstanceGenerator, ObliviousCommitments, SigmaProtocol, Transcript};

/// Wire tag for this instantiation.
pub const GQ_SCHEME_TAG: u8 = 0x01;

const KEYGEN_RETRY_BUDGET: usize = 64;

/// Parameter set: modulus size and public exponent.
#[derive(Clone, Debug)]
pub struct GqScheme {
    modulus_bits: u32,
    public_exponent: u64,
}

/// Public statement `(e, N, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GqStatement {
    e: BigUint,
    n: BigUint,
    y: BigUint,
}

/// Full signing witness: the root plus the factoring trapdoor.
#[derive(Clone, Debug, PartialEq)]
pub struct GqWitness {
    root: BigUint,
    p: BigUint,
    q: BigUint,
    d: BigUint,
}

impl GqScheme {
    /// `modulus_bits` in `16..=64`, `e` prime.
    pub fn new(modulus_bits: u32, public_exponent: u64) -> Result<Self, SigmaError> {
        if !(16..=64).contains(&modulus_bits) {
            return Err(SigmaError::UnsupportedParameters(format!(
                "modulus_bits {modulus_bits} outside 16..=64"
            )));
        }
        if !is_prime_u64(public_exponent) {
            return Err(SigmaError::UnsupportedParameters(format!(
                "public exponent {public_exponent} is not prime"
            )));
        }
        Ok(GqScheme {
            modulus_bits,
            public_exponent,
        })
    }

    /// 32-bit modulus with e = 65537; the fast test configuration.
    pub fn toy() -> Self {
        GqScheme::new(32, 65537).expect("toy parameters are valid")
    }

    pub fn modulus_bits(&self) -> u32 {
        self.modulus_bits
    }

    pub fn public_exponent(&self) -> u64 {
        self.public_exponent
    }

    /// Generates `N = p * q` with `gcd(e, phi(N)) = 1` and a uniform unit
    /// root `w` with `y = w^e`.
    pub fn keygen<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(GqStatement, GqWitness), SigmaError> {
        let e = BigUint::from(self.public_exponent);
        for _ in 0..KEYGEN_RETRY_BUDGET {
            let pb = self.modulus_bits / 2;
            let qb = self.modulus_bits - pb;
            let p = random_prime(pb, rng);
            let q = random_prime(qb, rng);
            if p == q {
                continue;
            }
            let phi = (&p - 1u32) * (&q - 1u32);
            if phi.gcd(&e) != BigUint::one() {
                continue;
            }
            let n = &p * &q;
            let d = mod_inverse(&e, &phi).expect("e invertible once gcd check passed");
            let root = random_unit(&n, rng);
            let y = root.modpow(&e, &n);
            let statement = GqStatement { e, n, y };
            let witness = GqWitness { root, p, q, d };
            return Ok((statement, witness));
        }
        Err(SigmaError::ExponentDividesTotient)
    }
}

impl GqStatement {
    /// Builds a statement from raw values, checking that `y` is a unit.
    pub fn from_parts(e: u64, n: u64, y: u64) -> Result<Self, SigmaError> {
        let e = BigUint::from(e);
        let n = BigUint::from(n);
        let y = BigUint::from(y);
        if y.gcd(&n) != BigUint::one() || y >= n {
            return Err(SigmaError::UnsupportedParameters(
                "y is not a unit modulo N".into(),
            ));
        }
        Ok(GqStatement { e, n, y })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn exponent(&self) -> &BigUint {
        &self.e
    }

    pub fn image(&self) -> &BigUint {
        &self.y
    }
}

impl GqWitness {
    /// Assembles a witness from known factors; `d` is recomputed.
    pub fn from_parts(root: u64, p: u64, q: u64, e: u64) -> Result<Self, SigmaError> {
        let p = BigUint::from(p);
        let q = BigUint::from(q);
        let phi = (&p - 1u32) * (&q - 1u32);
        let d = mod_inverse(&BigUint::from(e), &phi).ok_or(SigmaError::ExponentDividesTotient)?;
        Ok(GqWitness {
            root: BigUint::from(root),
            p,
            q,
            d,
        })
    }

    pub fn root(&self) -> &BigUint {
        &self.root
    }
}

/// Computes the e-th root of a given commitment through the trapdoor:
/// `u = R^d mod N` with `u^e = R`.
pub fn oblivious_root(witness: &GqWitness, r: &BigUint) -> Result<BigUint, SigmaError> {
    let n = &witness.p * &witness.q;
    if r.gcd(&n) != BigUint::one() {
        return Err(SigmaError::NotCoprime);
    }
    Ok(r.modpow(&witness.d, &n))
}

/// Prover's response `z = u * w^c mod N`.
pub fn respond_with_root(witness: &GqWitness, u: &BigUint, c: u128) -> BigUint {
    let n = &witness.p * &witness.q;
    (u * witness.root.modpow(&BigUint::from(c), &n)) % &n
}

/// The verification predicate `z^e = R * y^c mod N`, pure in its inputs.
pub fn verify_parts(statement: &GqStatement, r: &BigUint, c: u128, z: &BigUint) -> bool {
    let n = &statement.n;
    if r.is_zero() || z.is_zero() || r >= n || z >= n {
        return false;
    }
    let lhs = z.modpow(&statement.e, n);
    let rhs = (r * statement.y.modpow(&BigUint::from(c), n)) % n;
    lhs == rhs
}

/// Extracts an e-th root of `y` from two accepting transcripts on the same
/// commitment: with `delta = c1 - c2` and `a*delta + b*e = 1`,
/// `w' = (z1/z2)^a * y^b mod N`.
pub fn extract_root(
    statement: &GqStatement,
    t1: &Transcript<BigUint, BigUint>,
    t2: &Transcript<BigUint, BigUint>,
) -> Result<BigUint, SigmaError> {
    if t1.ch == t2.ch {
        return Err(SigmaError::SameChallenge);
    }
    let c1 = t1.ch.to_u128();
    let c2 = t2.ch.to_u128();
    if !verify_parts(statement, &t1.com, c1, &t1.rsp)
        || !verify_parts(statement, &t2.com, c2, &t2.rsp)
        || t1.com != t2.com
    {
        return Err(SigmaError::NotVerifying);
    }
    let n = &statement.n;
    let delta = BigInt::from(c1) - BigInt::from(c2);
    let e = BigInt::from_biguint(Sign::Plus, statement.e.clone());
    // 0 < |delta| < e and e prime, so gcd(delta, e) = 1 always.
    let ext = delta.extended_gcd(&e);
    debug_assert!(ext.gcd.is_one());
    let z2_inv = mod_inverse(&t2.rsp, n).ok_or(SigmaError::NotCoprime)?;
    let ratio = (&t1.rsp * &z2_inv) % n;
    let root = (pow_signed(&ratio, &ext.x, n) * pow_signed(&statement.y, &ext.y, n)) % n;
    Ok(root)
}

impl SigmaProtocol for GqScheme {
    type Statement = GqStatement;
    type Witness = GqWitness;
    type Commitment = BigUint;
    type Response = BigUint;
    type Extracted = BigUint;

    fn scheme_tag(&self) -> u8 {
        GQ_SCHEME_TAG
    }

    fn challenge_bits(&self) -> usize {
        // Challenges lie strictly below e: 2^l <= e.
        (64 - self.public_exponent.leading_zeros() - 1) as usize
    }

    fn security_param(&self) -> u32 {
        self.modulus_bits
    }

    fn relation_check(&self, statement: &GqStatement, witness: &GqWitness) -> bool {
        let n = &statement.n;
        let phi = (&witness.p - 1u32) * (&witness.q - 1u32);
        &witness.p * &witness.q == *n
            && witness.root.modpow(&statement.e, n) == statement.y
            && (&statement.e * &witness.d) % &phi == BigUint::one()
    }

    fn honest_commit<R: Rng + ?Sized>(&self, statement: &GqStatement, rng: &mut R) -> BigUint {
        let u = random_unit(&statement.n, rng);
        u.modpow(&statement.e, &statement.n)
    }

    fn respond<R: Rng + ?Sized>(
        &self,
        _statement: &GqStatement,
        witness: &GqWitness,
        commitment: &BigUint,
        challenge: &BitString,
        _rng: &mut R,
    ) -> Result<BigUint, SigmaError> {
        let u = oblivious_root(witness, commitment)?;
        Ok(respond_with_root(witness, &u, challenge.to_u128()))
    }

    fn verify(
        &self,
        statement: &GqStatement,
        commitment: &BigUint,
        challenge: &BitString,
        response: &BigUint,
    ) -> bool {
        challenge.bit_len() == self.challenge_bits()
            && verify_parts(statement, commitment, challenge.to_u128(), response)
    }

    fn simulate<R: Rng + ?Sized>(
        &self,
        statement: &GqStatement,
        rng: &mut R,
    ) -> Result<Transcript<BigUint, BigUint>, SigmaError> {
        let n = &statement.n;
        let z = random_unit(n, rng);
        let ch = BitString::random(self.challenge_bits(), rng);
        let c = ch.to_u128();
        let y_c = statement.y.modpow(&BigUint::from(c), n);
        let y_c_inv = mod_inverse(&y_c, n).expect("y is a unit");
        let com = (z.modpow(&statement.e, n) * y_c_inv) % n;
        Ok(Transcript { com, ch, rsp: z })
    }

    fn extract(
        &self,
        statement: &GqStatement,
        first: &Transcript<BigUint, BigUint>,
        second: &Transcript<BigUint, BigUint>,
    ) -> Result<BigUint, SigmaError> {
        extract_root(statement, first, second)
    }

    fn extracted_check(&self, statement: &GqStatement, extracted: &BigUint) -> bool {
        extracted.modpow(&statement.e, &statement.n) == statement.y
    }

    fn encode_statement(&self, statement: &GqStatement) -> Vec<u8> {
        let mut out = Vec::new();
        push_chunk(&mut out, &statement.e);
        push_chunk(&mut out, &statement.n);
        push_chunk(&mut out, &statement.y);
        out
    }

    fn decode_statement(&self, bytes: &[u8]) -> Result<GqStatement, SigmaError> {
        let mut off = 0;
        let e = read_chunk(bytes, &mut off)?;
        let n = read_chunk(bytes, &mut off)?;
        let y = read_chunk(bytes, &mut off)?;
        if off != bytes.len() {
            return Err(SigmaError::ShapeMismatch("trailing bytes after statement"));
        }
        Ok(GqStatement { e, n, y })
    }

    fn encode_witness(&self, witness: &GqWitness) -> Vec<u8> {
        let mut out = Vec::new();
        push_chunk(&mut out, &witness.root);
        push_chunk(&mut out, &witness.p);
        push_chunk(&mut out, &witness.q);
        push_chunk(&mut out, &witness.d);
        out
    }

    fn decode_witness(
        &self,
        _statement: &GqStatement,
        bytes: &[u8],
    ) -> Result<GqWitness, SigmaError> {
        let mut off = 0;
        let root = read_chunk(bytes, &mut off)?;
        let p = read_chunk(bytes, &mut off)?;
        let q = read_chunk(bytes, &mut off)?;
        let d = read_chunk(bytes, &mut off)?;
        if off != bytes.len() {
            return Err(SigmaError::ShapeMismatch("trailing bytes after witness"));
        }
        Ok(GqWitness { root, p, q, d })
    }

    fn encode_commitment(&self, commitment: &BigUint) -> Vec<u8> {
        let mut out = Vec::new();
        push_chunk(&mut out, commitment);
        out
    }

    fn decode_commitment(&self, bytes: &[u8]) -> Result<BigUint, SigmaError> {
        let mut off = 0;
        let v = read_chunk(bytes, &mut off)?;
        if off != bytes.len() {
            return Err(SigmaError::ShapeMismatch("trailing bytes after commitment"));
        }
        Ok(v)
    }

    fn encode_response(&self, response: &BigUint) -> Vec<u8> {
        let mut out = Vec::new();
        push_chunk(&mut out, response);
        out
    }

    fn decode_response(&self, bytes: &[u8]) -> Result<BigUint, SigmaError> {
        let mut off = 0;
        let v = read_chunk(bytes, &mut off)?;
        if off != bytes.len() {
            return Err(SigmaError::ShapeMismatch("trailing bytes after response"));
        }
        Ok(v)
    }
}

impl ObliviousCommitments for GqScheme {
    fn randomness_bits(&self) -> usize {
        // 64 bits of slack keep the mod-N reduction bias below 2^-64.
        self.modulus_bits as usize + 64
    }

    fn commit_from_randomness(
        &self,
        statement: &GqStatement,
        rho: &BitString,
    ) -> Result<BigUint, SigmaError> {
        if rho.bit_len() != self.randomness_bits() {
            return Err(SigmaError::BadRandomnessLength {
                expected: self.randomness_bits(),
                got: rho.bit_len(),
            });
        }
        let n = &statement.n;
        let candidate = rho.to_biguint() % n;
        if !candidate.is_zero() && candidate.gcd(n) == BigUint::one() {
            return Ok(candidate);
        }
        // Resample within the rho-derived stream until a unit comes up.
        let chunk = self.randomness_bits().div_ceil(8);
        let mut prefix = Vec::new();
        prefix.extend_from_slice(b"gq-com:");
        prefix.extend_from_slice(&self.encode_statement(statement));
        prefix.extend_from_slice(rho.as_bytes());
        for attempt in 0u32..10_000 {
            let mut data = prefix.clone();
            data.extend_from_slice(&attempt.to_le_bytes());
            let candidate = BigUint::from_bytes_be(&shake256(&data, chunk)) % n;
            if !candidate.is_zero() && candidate.gcd(n) == BigUint::one() {
                return Ok(candidate);
            }
        }
        unreachable!("unit density is at least 1/4 for any RSA modulus");
    }

    fn sample_randomness<R: Rng + ?Sized>(
        &self,
        statement: &GqStatement,
        commitment: &BigUint,
        rng: &mut R,
    ) -> Result<BitString, SigmaError> {
        let n = &statement.n;
        if commitment.is_zero() || commitment >= n || commitment.gcd(n) != BigUint::one() {
            return Err(SigmaError::NotInRange);
        }
        // Uniform preimage under the mod-N branch of the commitment map:
        // rho = R + k*N for k uniform over the admissible range.
        let max = (BigUint::one() << self.randomness_bits()) - BigUint::one();
        let k_bound = (&max - commitment) / n + BigUint::one();
        let k = random_below(&k_bound, rng);
        Ok(BitString::from_biguint(
            &(commitment + k * n),
            self.randomness_bits(),
        ))
    }
}

impl InstanceGenerator for GqScheme {
    fn generate<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(GqStatement, GqWitness), SigmaError> {
        self.keygen(rng)
    }
}

// ---- big-integer helpers ----

fn push_chunk(out: &mut Vec<u8>, v: &BigUint) {
    let bytes = if v.is_zero() {
        Vec::new()
    } else {
        v.to_bytes_be()
    };
    let len = u16::try_from(bytes.len()).expect("value too large for encoding");
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(&bytes);
}

fn read_chunk(bytes: &[u8], off: &mut usize) -> Result<BigUint, SigmaError> {
    if *off + 2 > bytes.len() {
        return Err(SigmaError::ShapeMismatch("truncated length prefix"));
    }
    let len = u16::from_be_bytes([bytes[*off], bytes[*off + 1]]) as usize;
    *off += 2;
    if *off + len > bytes.len() {
        return Err(SigmaError::ShapeMismatch("truncated integer body"));
    }
    let v = BigUint::from_bytes_be(&bytes[*off..*off + len]);
    *off += len;
    Ok(v)
}

/// Modular inverse via the extended Euclidean algorithm.
pub fn mod_inverse(a: &BigUint, n: &BigUint) -> Option<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a.clone());
    let n_int = BigInt::from_biguint(Sign::Plus, n.clone());
    let ext = a.extended_gcd(&n_int);
    if !ext.gcd.is_one() {
        return None;
    }
    let mut x = ext.x % &n_int;
    if x.is_negative() {
        x += &n_int;
    }
    Some(x.to_biguint().unwrap())
}

fn pow_signed(base: &BigUint, exp: &BigInt, n: &BigUint) -> BigUint {
    let mag = exp.magnitude();
    if exp.is_negative() {
        mod_inverse(base, n).expect("base is a unit").modpow(mag, n)
    } else {
        base.modpow(mag, n)
    }
}

/// Uniform value in `[0, bound)`.
fn random_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits() as usize;
    loop {
        let candidate = BitString::random(bits, rng).to_biguint();
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Uniform unit modulo `n`.
fn random_unit<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> BigUint {
    loop {
        let candidate = random_below(n, rng);
        if !candidate.is_zero() && candidate.gcd(n) == BigUint::one() {
            return candidate;
        }
    }
}

fn sieve_primes() -> &'static [u32] {
    static SIEVE: OnceLock<Vec<u32>> = OnceLock::new();
    SIEVE.get_or_init(|| {
        const LIMIT: usize = 1 << 16;
        let mut composite = vec![false; LIMIT + 1];
        let mut primes = Vec::new();
        for i in 2..=LIMIT {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= LIMIT {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

fn is_prime_u64(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    for &p in sieve_primes() {
        let p = u64::from(p);
        if p * p > v {
            break;
        }
        if v % p == 0 {
            return v == p;
        }
    }
    true
}

/// Random prime of exactly `bits` bits, by trial division. `bits <= 32`.
fn random_prime<R: Rng + ?Sized>(bits: u32, rng: &mut R) -> BigUint {
    assert!(
        (8..=32).contains(&bits),
        "trial division covers at most 32-bit primes"
    );
    loop {
        let mut candidate: u64 = rng.gen_range(0..(1u64 << (bits - 1)));
        candidate |= 1u64 << (bits - 1);
        candidate |= 1;
        if is_prime_u64(candidate) {
            return BigUint::from(candidate);
        }
    }
}
