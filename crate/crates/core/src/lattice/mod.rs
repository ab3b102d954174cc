//! Trapdoored Lyubashevsky-style identification with oblivious commitments.
//!
//! Keys are a trapdoored matrix A with a short secret S and its image
//! R = A S mod q. A run commits to a target Y in Z_q^n, challenges with a
//! sparse sign vector c, and responds with z = y' - S c for a Gaussian
//! preimage y' of Y. Rejection sampling makes the response distribution
//! independent of S; the verifier accepts iff ||z|| <= eta s sqrt(m) and
//! R c = Y - A z. Because Y can be any point of Z_q^n, the hash oracle
//! samples commitments directly, which is exactly what the signature
//! transform needs.
//!
//! The modulus is a power of two so the gadget decomposition is exact;
//! parameters are desk scale with no constant-time hardening.

mod challenge;
mod gaussian;
mod trapdoor;

pub use challenge::{
    challenge_from_index, challenge_space_size, derive_challenge, enumerate_challenge_space,
    sample_uniform_challenge, LatticeChallenge, CHALLENGE_SEED_BITS,
};
pub use gaussian::{gaussian_sample_1d, Gso};
pub use trapdoor::{gen_trap, sample_preimage, LatticeTrapdoorKey, KLEIN_SLACK};

use rand::Rng;

use crate::bits::BitString;
use crate::error::SigmaError;
use crate::sigma::{InstanceGenerator, ObliviousCommitments, SigmaProtocol, Transcript};

/// Wire tag for this instantiation.
pub const LATTICE_SCHEME_TAG: u8 = 0x02;

/// Rejection-sampling constant M = exp(1 + 1/288); the expected number of
/// response attempts per signature.
pub fn rejection_m() -> f64 {
    (1.0_f64 + 1.0 / 288.0).exp()
}

/// Parameter set. The Gaussian convention is rho_s(x) = exp(-pi ||x||^2 / s^2).
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeParams {
    /// Row dimension of A.
    pub n: usize,
    /// Modulus exponent; q = 2^log2_q.
    pub log2_q: u32,
    /// Column dimension of A.
    pub m: usize,
    /// Secret width (columns of S).
    pub k: usize,
    /// Secret coefficient bound.
    pub d: i64,
    /// Challenge weight bound.
    pub kappa: usize,
    /// Gaussian parameter.
    pub s: f64,
    /// Verification slack.
    pub eta: f64,
    /// Security parameter.
    pub lambda: u32,
}

impl LatticeParams {
    pub fn q(&self) -> u64 {
        1u64 << self.log2_q
    }

    /// Width of the gadget block, n * log2(q).
    pub fn gadget_width(&self) -> usize {
        self.n * self.log2_q as usize
    }

    /// Named built-in presets.
    ///
    /// * `t0` — n=4, q=2^8, m=64: the smallest generator exercise.
    /// * `t1` — n=8, q=2^10, m=160: the reference toy preset.
    pub fn preset(name: &str) -> Result<Self, SigmaError> {
        let p = match name {
            "t0" => LatticeParams {
                n: 4,
                log2_q: 8,
                m: 64, // 2 n log2 q = 64
                k: 8,
                d: 1,
                kappa: 4, // 2^4 C(8,4) = 1120 >= 2^10
                s: 384.0, // 12 d kappa sqrt(64) = 384
                eta: 1.1,
                lambda: 10,
            },
            "t1" => LatticeParams {
                n: 8,
                log2_q: 10,
                m: 160, // 2 n log2 q = 160
                k: 8,
                d: 1,
                kappa: 4, // 2^4 C(8,4) = 1120 >= 2^10
                s: 608.0, // ceil(12 d kappa sqrt(160)) = 608
                eta: 1.1,
                lambda: 10,
            },
            _ => {
                return Err(SigmaError::UnsupportedParameters(format!(
                    "unknown preset {name}"
                )))
            }
        };
        p.validate()?;
        Ok(p)
    }

    /// Parses a line-oriented `key = value` preset file; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SigmaError> {
        let mut fields = std::collections::HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SigmaError::UnsupportedParameters(format!(
                    "preset line {} is not key=value",
                    lineno + 1
                ))
            })?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| -> Result<f64, SigmaError> {
            fields
                .get(key)
                .ok_or_else(|| {
                    SigmaError::UnsupportedParameters(format!("preset missing key {key}"))
                })?
                .parse::<f64>()
                .map_err(|_| {
                    SigmaError::UnsupportedParameters(format!("preset key {key} is not numeric"))
                })
        };
        let params = LatticeParams {
            n: get("n")? as usize,
            log2_q: get("log2_q")? as u32,
            m: get("m")? as usize,
            k: get("k")? as usize,
            d: get("d")? as i64,
            kappa: get("kappa")? as usize,
            s: get("s")?,
            eta: get("eta")?,
            lambda: get("lambda")? as u32,
        };
        params.validate()?;
        Ok(params)
    }

    /// Re-validates the parameter invariants.
    pub fn validate(&self) -> Result<(), SigmaError> {
        let fail = |msg: String| Err(SigmaError::UnsupportedParameters(msg));
        if self.n == 0 || self.m == 0 || self.k == 0 || self.kappa == 0 || self.lambda == 0 {
            return fail("dimensions must be positive".into());
        }
        if self.d <= 0 || self.s <= 0.0 || self.eta < 1.0 {
            return fail("d, s must be positive and eta at least 1".into());
        }
        if self.log2_q == 0 || self.log2_q > 31 {
            return fail(format!("log2_q {} outside 1..=31", self.log2_q));
        }
        if self.kappa > self.k {
            return fail("kappa exceeds k".into());
        }
        if self.m < 2 * self.n * self.log2_q as usize {
            return fail(format!(
                "m = {} below 2 n log2 q = {}",
                self.m,
                2 * self.n * self.log2_q as usize
            ));
        }
        // Challenge space at least 2^lambda: 2^kappa C(k, kappa) >= 2^lambda.
        let lead = challenge::binomial(self.k, self.kappa) << self.kappa;
        if self.lambda >= 63 || lead < (1u128 << self.lambda) {
            return fail(format!(
                "challenge space 2^kappa C(k,kappa) = {lead} below 2^lambda"
            ));
        }
        if challenge_space_size(self.k, self.kappa) > (1u128 << 63) {
            return fail("challenge space too large for exact indexing".into());
        }
        let s_min = 12.0 * self.d as f64 * self.kappa as f64 * (self.m as f64).sqrt();
        if self.s < s_min - 1e-9 {
            return fail(format!(
                "s = {} below 12 d kappa sqrt(m) = {s_min:.3}",
                self.s
            ));
        }
        Ok(())
    }

    /// Cap on basis column norms the generator enforces; keeps the sampler
    /// threshold safely below the preset's s.
    pub fn basis_quality_bound(&self) -> f64 {
        self.s / KLEIN_SLACK
    }

    /// floor((eta s)^2 m): squared verification norm bound.
    pub fn response_norm_bound_sq(&self) -> i128 {
        ((self.eta * self.s) * (self.eta * self.s) * self.m as f64).floor() as i128
    }

    /// floor((2 eta s)^2 m): squared bound on extracted solutions.
    pub fn extraction_norm_bound_sq(&self) -> i128 {
        ((2.0 * self.eta * self.s) * (2.0 * self.eta * self.s) * self.m as f64).floor() as i128
    }
}

/// Row-major matrix of residues in [0, q).
#[derive(Clone, Debug, PartialEq)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    q: u64,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zero(rows: usize, cols: usize, q: u64) -> Self {
        ModMatrix {
            rows,
            cols,
            q,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(v < self.q);
        self.data[r * self.cols + c] = v;
    }

    /// A * v mod q for a signed integer vector.
    pub fn mul_signed_vec(&self, v: &[i64]) -> Vec<u64> {
        assert_eq!(
            v.len(),
            self.cols,
            "vector length must equal the column count"
        );
        let q = self.q as i128;
        (0..self.rows)
            .map(|r| {
                let mut acc: i128 = 0;
                for c in 0..self.cols {
                    acc += self.data[r * self.cols + c] as i128 * v[c] as i128;
                }
                acc.rem_euclid(q) as u64
            })
            .collect()
    }

    /// A * v mod q for small signed coefficients.
    pub fn mul_i8_vec(&self, v: &[i8]) -> Vec<u64> {
        let wide: Vec<i64> = v.iter().map(|&x| x as i64).collect();
        self.mul_signed_vec(&wide)
    }
}

/// Public statement: the trapdoored matrix and the image of the secret.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePublicKey {
    pub a: ModMatrix,
    pub r: ModMatrix,
}

/// Signing witness: the short secret S (columns) plus the sampling trapdoor.
#[derive(Clone, Debug)]
pub struct LatticeSecretKey {
    /// k columns, each of length m, entries in {-d, ..., d}.
    pub secret: Vec<Vec<i64>>,
    pub trapdoor: LatticeTrapdoorKey,
}

/// Key material of one identity: A and trapdoor, S, and R = A S.
#[derive(Clone, Debug)]
pub struct LatticeKeys {
    pub public: LatticePublicKey,
    pub secret: LatticeSecretKey,
}

/// Generates a full key set for the preset.
pub fn keygen<R: Rng + ?Sized>(
    params: &LatticeParams,
    rng: &mut R,
) -> Result<LatticeKeys, SigmaError> {
    let trapdoor = gen_trap(params, rng)?;
    let secret: Vec<Vec<i64>> = (0..params.k)
        .map(|_| {
            (0..params.m)
                .map(|_| rng.gen_range(-params.d..=params.d))
                .collect()
        })
        .collect();
    let mut r = ModMatrix::zero(params.n, params.k, params.q());
    for (j, col) in secret.iter().enumerate() {
        for (i, &v) in trapdoor.matrix().mul_signed_vec(col).iter().enumerate() {
            r.set(i, j, v);
        }
    }
    let public = LatticePublicKey {
        a: trapdoor.matrix().clone(),
        r,
    };
    Ok(LatticeKeys {
        public,
        secret: LatticeSecretKey { secret, trapdoor },
    })
}

/// S * c over the integers.
pub fn secret_times_challenge(secret: &[Vec<i64>], c: &LatticeChallenge) -> Vec<i64> {
    let m = secret[0].len();
    let mut out = vec![0i64; m];
    for (col, &cj) in secret.iter().zip(c.coeffs()) {
        if cj != 0 {
            for (o, &v) in out.iter_mut().zip(col) {
                *o += cj as i64 * v;
            }
        }
    }
    out
}

fn norm_sq(v: &[i64]) -> i128 {
    v.iter().map(|&x| x as i128 * x as i128).sum()
}

fn dot_i128(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Probability that rejection sampling keeps `z` when its pre-rejection
/// distribution is the Gaussian centered at `center`:
/// min(1, D_s(z) / (M D_{center,s}(z))).
pub fn rejection_acceptance_prob(z: &[i64], center: &[i64], s: f64) -> f64 {
    let exponent = std::f64::consts::PI
        * ((norm_sq(center) as f64) - 2.0 * (dot_i128(z, center) as f64))
        / (s * s);
    (exponent.exp() / rejection_m()).min(1.0)
}

/// Prover response to target Y and challenge c: a Gaussian preimage of Y
/// shifted by -S c, kept with the rejection probability that erases the
/// dependence on S.
pub fn respond<R: Rng + ?Sized>(
    params: &LatticeParams,
    secret: &LatticeSecretKey,
    target: &[u64],
    c: &LatticeChallenge,
    rng: &mut R,
) -> Result<Vec<i64>, SigmaError> {
    if target.len() != params.n {
        return Err(SigmaError::ShapeMismatch("commitment length must equal n"));
    }
    if c.coeffs().len() != params.k {
        return Err(SigmaError::ShapeMismatch("challenge length must equal k"));
    }
    let preimage = sample_preimage(&secret.trapdoor, target, params.s, rng)?;
    let shift = secret_times_challenge(&secret.secret, c);
    let z: Vec<i64> = preimage
        .iter()
        .zip(&shift)
        .map(|(&y, &sc)| y - sc)
        .collect();
    // Before rejection z is Gaussian around -S c.
    let center: Vec<i64> = shift.iter().map(|&v| -v).collect();
    let keep = rejection_acceptance_prob(&z, &center, params.s);
    if rng.gen::<f64>() >= keep || norm_sq(&z) > params.response_norm_bound_sq() {
        return Err(SigmaError::Abort);
    }
    Ok(z)
}

/// The identification verifier: ||z|| <= eta s sqrt(m) (compared on squared
/// integers) and R c = Y - A z mod q.
pub fn verify_id(
    params: &LatticeParams,
    pk: &LatticePublicKey,
    target: &[u64],
    c: &LatticeChallenge,
    z: &[i64],
) -> Result<bool, SigmaError> {
    if target.len() != params.n || pk.a.rows() != params.n || pk.a.cols() != params.m {
        return Err(SigmaError::ShapeMismatch(
            "commitment or matrix shape mismatch",
        ));
    }
    if c.coeffs().len() != params.k || pk.r.cols() != params.k {
        return Err(SigmaError::ShapeMismatch("challenge length must equal k"));
    }
    if z.len() != params.m {
        return Err(SigmaError::ShapeMismatch("response length must equal m"));
    }
    if norm_sq(z) > params.response_norm_bound_sq() {
        return Ok(false);
    }
    let rc = pk.r.mul_i8_vec(c.coeffs());
    let az = pk.a.mul_signed_vec(z);
    let q = params.q();
    let ok = rc
        .iter()
        .zip(target.iter().zip(&az))
        .all(|(&rc_i, (&y_i, &az_i))| rc_i == (y_i + q - az_i) % q);
    Ok(ok)
}

/// Honest-verifier simulator on raw protocol values. Aborts with the real
/// prover's rate 1 - 1/M; otherwise z is a plain Gaussian inside the norm
/// bound, c uniform on V, and Y = A z + R c verifies by construction.
pub fn simulate_id<R: Rng + ?Sized>(
    params: &LatticeParams,
    pk: &LatticePublicKey,
    rng: &mut R,
) -> Result<(Vec<u64>, LatticeChallenge, Vec<i64>), SigmaError> {
    if rng.gen::<f64>() >= 1.0 / rejection_m() {
        return Err(SigmaError::Abort);
    }
    let c = sample_uniform_challenge(params.k, params.kappa, rng);
    let z = sample_bounded_gaussian_vec(params, rng);
    let az = pk.a.mul_signed_vec(&z);
    let rc = pk.r.mul_i8_vec(c.coeffs());
    let q = params.q();
    let y: Vec<u64> = az.iter().zip(&rc).map(|(&a, &r)| (a + r) % q).collect();
    Ok((y, c, z))
}

fn sample_bounded_gaussian_vec<R: Rng + ?Sized>(params: &LatticeParams, rng: &mut R) -> Vec<i64> {
    loop {
        let z: Vec<i64> = (0..params.m)
            .map(|_| gaussian_sample_1d(params.s, 0.0, rng))
            .collect();
        if norm_sq(&z) <= params.response_norm_bound_sq() {
            return z;
        }
    }
}

/// A short solution extracted from a fork: A u = R e mod q with e a small
/// nonzero challenge difference.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedSolution {
    pub u: Vec<i64>,
    pub e: Vec<i64>,
}

/// Subtracts two accepting transcripts that share a commitment:
/// u = z1 - z2 and e = c2 - c1 satisfy A u = R e mod q.
pub fn extract_solution(
    params: &LatticeParams,
    pk: &LatticePublicKey,
    first: &(Vec<u64>, LatticeChallenge, Vec<i64>),
    second: &(Vec<u64>, LatticeChallenge, Vec<i64>),
) -> Result<ExtractedSolution, SigmaError> {
    if first.1 == second.1 {
        return Err(SigmaError::SameChallenge);
    }
    if first.0 != second.0
        || !verify_id(params, pk, &first.0, &first.1, &first.2)?
        || !verify_id(params, pk, &second.0, &second.1, &second.2)?
    {
        return Err(SigmaError::NotVerifying);
    }
    let u: Vec<i64> = first
        .2
        .iter()
        .zip(&second.2)
        .map(|(&a, &b)| a - b)
        .collect();
    let e: Vec<i64> = second
        .1
        .coeffs()
        .iter()
        .zip(first.1.coeffs())
        .map(|(&c2, &c1)| c2 as i64 - c1 as i64)
        .collect();
    debug_assert_eq!(pk.a.mul_signed_vec(&u), pk.r.mul_signed_vec(&e));
    Ok(ExtractedSolution { u, e })
}

/// The extracted relation: e nonzero with entries in {-2,...,2},
/// ||u|| <= 2 eta s sqrt(m), and A u = R e mod q.
pub fn extracted_solution_ok(
    params: &LatticeParams,
    pk: &LatticePublicKey,
    sol: &ExtractedSolution,
) -> bool {
    sol.e.iter().any(|&v| v != 0)
        && sol.e.iter().all(|&v| (-2..=2).contains(&v))
        && sol.u.len() == params.m
        && norm_sq(&sol.u) <= params.extraction_norm_bound_sq()
        && pk.a.mul_signed_vec(&sol.u) == pk.r.mul_signed_vec(&sol.e)
}

/// The scheme object: parameters fixed at construction, state in keys.
#[derive(Clone, Debug)]
pub struct LatticeScheme {
    params: LatticeParams,
}

impl LatticeScheme {
    pub fn new(params: LatticeParams) -> Result<Self, SigmaError> {
        params.validate()?;
        Ok(LatticeScheme { params })
    }

    pub fn preset(name: &str) -> Result<Self, SigmaError> {
        Ok(LatticeScheme {
            params: LatticeParams::preset(name)?,
        })
    }

    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    fn challenge(&self, ch: &BitString) -> Result<LatticeChallenge, SigmaError> {
        derive_challenge(ch, self.params.k, self.params.kappa)
    }

    /// Decodes witness bytes against a statement, rebuilding the kernel
    /// basis and its Gram-Schmidt data from the stored trapdoor matrix.
    pub fn decode_witness_for(
        &self,
        statement: &LatticePublicKey,
        bytes: &[u8],
    ) -> Result<LatticeSecretKey, SigmaError> {
        let p = &self.params;
        let w = p.gadget_width();
        let m_bar = p.m - w;
        let expect = 4 * (p.m * p.k + m_bar * w);
        if bytes.len() != expect {
            return Err(SigmaError::ShapeMismatch(
                "witness encoding has wrong length",
            ));
        }
        let mut words = bytes
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes(c.try_into().unwrap()) as i64);
        let secret: Vec<Vec<i64>> = (0..p.k)
            .map(|_| (0..p.m).map(|_| words.next().unwrap()).collect())
            .collect();
        let r_bar: Vec<Vec<i64>> = (0..m_bar)
            .map(|_| (0..w).map(|_| words.next().unwrap()).collect())
            .collect();
        let trapdoor = LatticeTrapdoorKey::rebuild(p, statement.a.clone(), r_bar);
        Ok(LatticeSecretKey { secret, trapdoor })
    }
}

impl SigmaProtocol for LatticeScheme {
    type Statement = LatticePublicKey;
    type Witness = LatticeSecretKey;
    type Commitment = Vec<u64>;
    type Response = Vec<i64>;
    type Extracted = ExtractedSolution;

    fn scheme_tag(&self) -> u8 {
        LATTICE_SCHEME_TAG
    }

    fn challenge_bits(&self) -> usize {
        CHALLENGE_SEED_BITS
    }

    fn security_param(&self) -> u32 {
        self.params.lambda
    }

    fn relation_check(&self, statement: &LatticePublicKey, witness: &LatticeSecretKey) -> bool {
        let p = &self.params;
        if witness.secret.len() != p.k
            || witness.secret.iter().any(|col| col.len() != p.m)
            || witness.secret.iter().flatten().any(|&v| v.abs() > p.d)
            || witness.trapdoor.matrix() != &statement.a
            || statement.r.rows() != p.n
            || statement.r.cols() != p.k
        {
            return false;
        }
        for (j, col) in witness.secret.iter().enumerate() {
            let image = statement.a.mul_signed_vec(col);
            if (0..p.n).any(|i| statement.r.get(i, j) != image[i]) {
                return false;
            }
        }
        witness
            .trapdoor
            .basis()
            .iter()
            .all(|b| statement.a.mul_signed_vec(b).iter().all(|&v| v == 0))
            && witness.trapdoor.max_basis_column_norm() <= p.basis_quality_bound()
            && witness.trapdoor.sampling_threshold() <= p.s
    }

    fn honest_commit<R: Rng + ?Sized>(
        &self,
        statement: &LatticePublicKey,
        rng: &mut R,
    ) -> Vec<u64> {
        // The interactive verifier's commitment: Y = A y for Gaussian y.
        let y: Vec<i64> = (0..self.params.m)
            .map(|_| gaussian_sample_1d(self.params.s, 0.0, rng))
            .collect();
        statement.a.mul_signed_vec(&y)
    }

    fn respond<R: Rng + ?Sized>(
        &self,
        _statement: &LatticePublicKey,
        witness: &LatticeSecretKey,
        commitment: &Vec<u64>,
        challenge: &BitString,
        rng: &mut R,
    ) -> Result<Vec<i64>, SigmaError> {
        let c = self.challenge(challenge)?;
        respond(&self.params, witness, commitment, &c, rng)
    }

    fn verify(
        &self,
        statement: &LatticePublicKey,
        commitment: &Vec<u64>,
        challenge: &BitString,
        response: &Vec<i64>,
    ) -> bool {
        let Ok(c) = self.challenge(challenge) else {
            return false;
        };
        verify_id(&self.params, statement, commitment, &c, response).unwrap_or(false)
    }

    fn simulate<R: Rng + ?Sized>(
        &self,
        statement: &LatticePublicKey,
        rng: &mut R,
    ) -> Result<Transcript<Vec<u64>, Vec<i64>>, SigmaError> {
        if rng.gen::<f64>() >= 1.0 / rejection_m() {
            return Err(SigmaError::Abort);
        }
        // Drawing the seed uniformly and deriving keeps c uniform on V
        // while the transcript carries a well-formed challenge string.
        let ch = BitString::random(CHALLENGE_SEED_BITS, rng);
        let c = self.challenge(&ch)?;
        let z = sample_bounded_gaussian_vec(&self.params, rng);
        let az = statement.a.mul_signed_vec(&z);
        let rc = statement.r.mul_i8_vec(c.coeffs());
        let q = self.params.q();
        let y: Vec<u64> = az.iter().zip(&rc).map(|(&a, &r)| (a + r) % q).collect();
        Ok(Transcript { com: y, ch, rsp: z })
    }

    fn extract(
        &self,
        statement: &LatticePublicKey,
        first: &Transcript<Vec<u64>, Vec<i64>>,
        second: &Transcript<Vec<u64>, Vec<i64>>,
    ) -> Result<ExtractedSolution, SigmaError> {
        if first.ch == second.ch {
            return Err(SigmaError::SameChallenge);
        }
        let t1 = (
            first.com.clone(),
            self.challenge(&first.ch)?,
            first.rsp.clone(),
        );
        let t2 = (
            second.com.clone(),
            self.challenge(&second.ch)?,
            second.rsp.clone(),
        );
        extract_solution(&self.params, statement, &t1, &t2)
    }

    fn extracted_check(&self, statement: &LatticePublicKey, sol: &ExtractedSolution) -> bool {
        extracted_solution_ok(&self.params, statement, sol)
    }

    fn encode_statement(&self, statement: &LatticePublicKey) -> Vec<u8> {
        let p = &self.params;
        let mut out = Vec::with_capacity(4 * (p.n * p.m + p.n * p.k));
        for r in 0..p.n {
            for c in 0..p.m {
                out.extend_from_slice(&(statement.a.get(r, c) as u32).to_le_bytes());
            }
        }
        for r in 0..p.n {
            for c in 0..p.k {
                out.extend_from_slice(&(statement.r.get(r, c) as u32).to_le_bytes());
            }
        }
        out
    }

    fn decode_statement(&self, bytes: &[u8]) -> Result<LatticePublicKey, SigmaError> {
        let p = &self.params;
        let expect = 4 * (p.n * p.m + p.n * p.k);
        if bytes.len() != expect {
            return Err(SigmaError::ShapeMismatch(
                "statement encoding has wrong length",
            ));
        }
        let q = p.q();
        let mut words = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as u64);
        let mut a = ModMatrix::zero(p.n, p.m, q);
        for r in 0..p.n {
            for c in 0..p.m {
                let v = words.next().unwrap();
                if v >= q {
                    return Err(SigmaError::ShapeMismatch("matrix residue out of range"));
                }
                a.set(r, c, v);
            }
        }
        let mut rm = ModMatrix::zero(p.n, p.k, q);
        for r in 0..p.n {
            for c in 0..p.k {
                let v = words.next().unwrap();
                if v >= q {
                    return Err(SigmaError::ShapeMismatch("matrix residue out of range"));
                }
                rm.set(r, c, v);
            }
        }
        Ok(LatticePublicKey { a, r: rm })
    }

    fn encode_witness(&self, witness: &LatticeSecretKey) -> Vec<u8> {
        let p = &self.params;
        let w = p.gadget_width();
        let m_bar = p.m - w;
        let mut out = Vec::with_capacity(4 * (p.m * p.k + m_bar * w));
        for col in &witness.secret {
            for &v in col {
                out.extend_from_slice(&(v as i32).to_le_bytes());
            }
        }
        for row in witness.trapdoor.r_bar() {
            for &v in row {
                out.extend_from_slice(&(v as i32).to_le_bytes());
            }
        }
        out
    }

    fn decode_witness(
        &self,
        statement: &LatticePublicKey,
        bytes: &[u8],
    ) -> Result<LatticeSecretKey, SigmaError> {
        self.decode_witness_for(statement, bytes)
    }

    fn encode_commitment(&self, commitment: &Vec<u64>) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 * commitment.len());
        for &v in commitment {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out
    }

    fn decode_commitment(&self, bytes: &[u8]) -> Result<Vec<u64>, SigmaError> {
        if bytes.len() != 4 * self.params.n {
            return Err(SigmaError::ShapeMismatch(
                "commitment encoding has wrong length",
            ));
        }
        let q = self.params.q();
        let out: Vec<u64> = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as u64)
            .collect();
        if out.iter().any(|&v| v >= q) {
            return Err(SigmaError::ShapeMismatch(
                "commitment coordinate out of range",
            ));
        }
        Ok(out)
    }

    fn encode_response(&self, response: &Vec<i64>) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 * response.len());
        for &v in response {
            out.extend_from_slice(&(v as i32).to_le_bytes());
        }
        out
    }

    fn decode_response(&self, bytes: &[u8]) -> Result<Vec<i64>, SigmaError> {
        if bytes.len() != 4 * self.params.m {
            return Err(SigmaError::ShapeMismatch(
                "response encoding has wrong length",
            ));
        }
        Ok(bytes
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes(c.try_into().unwrap()) as i64)
            .collect())
    }
}

impl ObliviousCommitments for LatticeScheme {
    fn randomness_bits(&self) -> usize {
        self.params.n * self.params.log2_q as usize
    }

    fn commit_from_randomness(
        &self,
        _statement: &LatticePublicKey,
        rho: &BitString,
    ) -> Result<Vec<u64>, SigmaError> {
        if rho.bit_len() != self.randomness_bits() {
            return Err(SigmaError::BadRandomnessLength {
                expected: self.randomness_bits(),
                got: rho.bit_len(),
            });
        }
        // Each log2(q)-bit slice is one coordinate; every bit pattern is a
        // point of Z_q^n, so uniform randomness gives a uniform commitment.
        let l = self.params.log2_q as usize;
        let out = (0..self.params.n)
            .map(|i| BitString::from_stream_slice(rho.as_bytes(), i * l, l).to_u128() as u64)
            .collect();
        Ok(out)
    }

    fn sample_randomness<R: Rng + ?Sized>(
        &self,
        _statement: &LatticePublicKey,
        commitment: &Vec<u64>,
        _rng: &mut R,
    ) -> Result<BitString, SigmaError> {
        if commitment.len() != self.params.n {
            return Err(SigmaError::NotInRange);
        }
        let q = self.params.q();
        if commitment.iter().any(|&v| v >= q) {
            return Err(SigmaError::NotInRange);
        }
        // The commitment map is a bijection on bit patterns; re-sampling
        // is the inverse packing.
        let l = self.params.log2_q as usize;
        let mut out = BitString::zero(0);
        for &v in commitment {
            out = out.concat(&BitString::from_u128(v as u128, l));
        }
        Ok(out)
    }
}

impl InstanceGenerator for LatticeScheme {
    fn generate<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(LatticePublicKey, LatticeSecretKey), SigmaError> {
        let keys = keygen(&self.params, rng)?;
        Ok((keys.public, keys.secret))
    }
}

#[cfg(test)]
mod tests;
