//! The challenge space V of sparse sign vectors and the map from uniform
//! seed bits onto it.
//!
//! V = { v in {-1,0,1}^k : ||v||_1 <= kappa }, of size
//! sum_{j<=kappa} C(k,j) 2^j. Challenges arriving from the hash oracle are
//! 128-bit seeds; reducing a 128-bit integer modulo |V| keeps the bias on
//! the induced distribution below 2^-64 for every supported parameter set.

use rand::Rng;

use crate::bits::BitString;
use crate::error::SigmaError;

/// Bits of challenge seed the encoder consumes.
pub const CHALLENGE_SEED_BITS: usize = 128;

/// A vector in V; coefficients in {-1, 0, 1} with l1 weight at most kappa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeChallenge {
    coeffs: Vec<i8>,
}

impl LatticeChallenge {
    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs
    }

    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }
}

pub(crate) fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// |V| = sum_{j<=kappa} C(k,j) 2^j.
pub fn challenge_space_size(k: usize, kappa: usize) -> u128 {
    (0..=kappa).map(|j| binomial(k, j) << j).sum()
}

/// Unranks an index in [0, |V|) into a challenge vector.
///
/// Indices enumerate weight classes in ascending weight; within a class the
/// support is the lexicographic combination and the low bits carry signs.
pub fn challenge_from_index(mut index: u128, k: usize, kappa: usize) -> LatticeChallenge {
    for j in 0..=kappa {
        let class = binomial(k, j) << j;
        if index < class {
            let comb_rank = index >> j;
            let sign_bits = index & ((1u128 << j) - 1);
            let support = combination_unrank(comb_rank, k, j);
            let mut coeffs = vec![0i8; k];
            for (b, &pos) in support.iter().enumerate() {
                coeffs[pos] = if (sign_bits >> b) & 1 == 1 { -1 } else { 1 };
            }
            return LatticeChallenge { coeffs };
        }
        index -= class;
    }
    panic!("index outside the challenge space");
}

fn combination_unrank(mut rank: u128, k: usize, j: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(j);
    let mut start = 0;
    for slot in 0..j {
        for cand in start..k {
            let rem = binomial(k - cand - 1, j - slot - 1);
            if rank < rem {
                out.push(cand);
                start = cand + 1;
                break;
            }
            rank -= rem;
        }
    }
    out
}

/// Deterministic map from a challenge seed to a vector in V.
pub fn derive_challenge(
    seed: &BitString,
    k: usize,
    kappa: usize,
) -> Result<LatticeChallenge, SigmaError> {
    if seed.bit_len() < CHALLENGE_SEED_BITS {
        return Err(SigmaError::SeedExhausted);
    }
    let head = BitString::from_stream_slice(seed.as_bytes(), 0, CHALLENGE_SEED_BITS);
    let index = head.to_u128() % challenge_space_size(k, kappa);
    Ok(challenge_from_index(index, k, kappa))
}

/// Exactly uniform challenge, for the simulator and the honest verifier.
pub fn sample_uniform_challenge<R: Rng + ?Sized>(
    k: usize,
    kappa: usize,
    rng: &mut R,
) -> LatticeChallenge {
    let size = challenge_space_size(k, kappa);
    // Rejection keeps the index exactly uniform.
    let limit = (u128::MAX / size) * size;
    loop {
        let raw = ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128;
        if raw < limit {
            return challenge_from_index(raw % size, k, kappa);
        }
    }
}

/// Brute-force enumeration of V; the independent oracle for cardinality and
/// distribution tests at small k.
pub fn enumerate_challenge_space(k: usize, kappa: usize) -> Vec<Vec<i8>> {
    let mut out = Vec::new();
    let mut cur = vec![0i8; k];
    fn walk(cur: &mut Vec<i8>, pos: usize, weight: usize, kappa: usize, out: &mut Vec<Vec<i8>>) {
        if weight > kappa {
            return;
        }
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in [0i8, 1, -1] {
            cur[pos] = v;
            walk(cur, pos + 1, weight + usize::from(v != 0), kappa, out);
        }
        cur[pos] = 0;
    }
    walk(&mut cur, 0, 0, kappa, &mut out);
    out
}
