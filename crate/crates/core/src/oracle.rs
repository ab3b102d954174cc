//! Random-oracle machinery: the oracle interface used by the signature
//! transform, a lazily sampled oracle, semi-constant distributions and
//! point reprogramming.
//!
//! Every oracle here is deterministic given its seeds, so whole experiments
//! replay exactly. Lazy tables guard their own mutation; instances are safe
//! to query concurrently once built.

use std::collections::HashMap;
use std::sync::Mutex;

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

/// Expands `data` to `n` bytes with SHAKE-256.
pub fn shake256(data: &[u8], n: usize) -> Vec<u8> {
    let mut h = Shake256::default();
    h.update(data);
    let mut out = vec![0u8; n];
    h.finalize_xof().read(&mut out);
    out
}

/// A random oracle with a fixed output length in bytes.
pub trait RandomOracle: Send + Sync {
    fn output_len(&self) -> usize;
    /// Evaluates the oracle; repeated queries return identical answers.
    fn eval(&self, input: &[u8]) -> Vec<u8>;
}

/// Evaluates an oracle. Thin wrapper so call sites read uniformly.
pub fn oracle_eval(oracle: &dyn RandomOracle, input: &[u8]) -> Vec<u8> {
    oracle.eval(input)
}

impl<T: RandomOracle + ?Sized> RandomOracle for std::sync::Arc<T> {
    fn output_len(&self) -> usize {
        (**self).output_len()
    }

    fn eval(&self, input: &[u8]) -> Vec<u8> {
        (**self).eval(input)
    }
}

/// The reference oracle instantiation: SHAKE-256 under an instance tag.
///
/// Two instances with different tags behave as independent random functions,
/// and the empty tag gives the fixed public function used for test vectors.
pub struct XofOracle {
    tag: Vec<u8>,
    output_len: usize,
}

impl XofOracle {
    pub fn new(tag: &[u8], output_len: usize) -> Self {
        XofOracle {
            tag: tag.to_vec(),
            output_len,
        }
    }

    /// The canonical instantiation with an empty instance tag.
    pub fn reference(output_len: usize) -> Self {
        Self::new(&[], output_len)
    }
}

impl RandomOracle for XofOracle {
    fn output_len(&self) -> usize {
        self.output_len
    }

    fn eval(&self, input: &[u8]) -> Vec<u8> {
        let mut data = Vec::with_capacity(5 + self.tag.len() + input.len());
        data.extend_from_slice(b"xof:");
        data.extend_from_slice(&(self.tag.len() as u32).to_le_bytes());
        data.extend_from_slice(&self.tag);
        data.extend_from_slice(input);
        shake256(&data, self.output_len)
    }
}

/// A lazily sampled random function.
///
/// Fresh answers are derived by expanding the seed, so the whole oracle
/// replays deterministically; answered points are cached in a table.
pub struct LazyOracle {
    seed: [u8; 32],
    output_len: usize,
    table: Mutex<HashMap<Vec<u8>, Vec<u8>>>,
}

impl LazyOracle {
    pub fn new(seed: [u8; 32], output_len: usize) -> Self {
        LazyOracle {
            seed,
            output_len,
            table: Mutex::new(HashMap::new()),
        }
    }

    /// Number of points answered so far.
    pub fn table_len(&self) -> usize {
        self.table.lock().unwrap().len()
    }
}

impl RandomOracle for LazyOracle {
    fn output_len(&self) -> usize {
        self.output_len
    }

    fn eval(&self, input: &[u8]) -> Vec<u8> {
        let mut table = self.table.lock().unwrap();
        if let Some(v) = table.get(input) {
            return v.clone();
        }
        let mut data = Vec::with_capacity(37 + input.len());
        data.extend_from_slice(b"lazy:");
        data.extend_from_slice(&self.seed);
        data.extend_from_slice(input);
        let out = shake256(&data, self.output_len);
        table.insert(input.to_vec(), out.clone());
        out
    }
}

/// An oracle drawn from the semi-constant distribution SC_delta.
///
/// Each input is independently a "member" with probability delta; members
/// answer the designated constant value, everything else falls through to
/// the base oracle. Membership is a keyed deterministic predicate, so the
/// per-input coin is fixed at the outset and replays exactly.
pub struct SemiConstantOracle {
    base: LazyOracle,
    delta: f64,
    y_star: Vec<u8>,
    membership_seed: [u8; 32],
}

impl SemiConstantOracle {
    /// `y_star` must match the base oracle's output length.
    pub fn new(
        base: LazyOracle,
        delta: f64,
        y_star: Vec<u8>,
        membership_seed: [u8; 32],
    ) -> Result<Self, LengthMismatch> {
        if y_star.len() != base.output_len() {
            return Err(LengthMismatch {
                expected: base.output_len(),
                got: y_star.len(),
            });
        }
        assert!((0.0..=1.0).contains(&delta), "delta must lie in [0,1]");
        Ok(SemiConstantOracle {
            base,
            delta,
            y_star,
            membership_seed,
        })
    }

    /// Whether `input` belongs to the reprogrammed delta-fraction.
    pub fn is_member(&self, input: &[u8]) -> bool {
        // Threshold comparison on expanded seed bytes; exact at delta 0 and 1.
        let mut data = Vec::with_capacity(35 + input.len());
        data.extend_from_slice(b"sc:");
        data.extend_from_slice(&self.membership_seed);
        data.extend_from_slice(input);
        let h = shake256(&data, 8);
        let x = u64::from_le_bytes(h.try_into().unwrap()) as u128;
        let threshold = (self.delta * 2.0f64.powi(64)).round() as u128;
        x < threshold
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn y_star(&self) -> &[u8] {
        &self.y_star
    }
}

impl RandomOracle for SemiConstantOracle {
    fn output_len(&self) -> usize {
        self.base.output_len()
    }

    fn eval(&self, input: &[u8]) -> Vec<u8> {
        if self.is_member(input) {
            self.y_star.clone()
        } else {
            self.base.eval(input)
        }
    }
}

/// Override value has the wrong length for the oracle.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("override value length {got} does not match oracle output length {expected}")]
pub struct LengthMismatch {
    pub expected: usize,
    pub got: usize,
}

/// An oracle with point overrides layered over a base oracle.
///
/// Override points return the override, everything else delegates. Repeated
/// overrides of the same point keep the latest value, so a whole sequence of
/// reprogrammings is realized as one layered oracle.
pub struct ReprogrammedOracle {
    base: Box<dyn RandomOracle>,
    overrides: HashMap<Vec<u8>, Vec<u8>>,
}

impl ReprogrammedOracle {
    pub fn over(base: Box<dyn RandomOracle>) -> Self {
        ReprogrammedOracle {
            base,
            overrides: HashMap::new(),
        }
    }

    pub fn override_count(&self) -> usize {
        self.overrides.len()
    }
}

impl std::fmt::Debug for ReprogrammedOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReprogrammedOracle")
            .field("overrides", &self.overrides.len())
            .field("output_len", &self.base.output_len())
            .finish()
    }
}

impl RandomOracle for ReprogrammedOracle {
    fn output_len(&self) -> usize {
        self.base.output_len()
    }

    fn eval(&self, input: &[u8]) -> Vec<u8> {
        if let Some(v) = self.overrides.get(input) {
            v.clone()
        } else {
            self.base.eval(input)
        }
    }
}

/// Reprograms an oracle on a single point, returning the layered oracle.
pub fn reprogram(
    mut oracle: ReprogrammedOracle,
    point: &[u8],
    value: Vec<u8>,
) -> Result<ReprogrammedOracle, LengthMismatch> {
    if value.len() != oracle.output_len() {
        return Err(LengthMismatch {
            expected: oracle.output_len(),
            got: value.len(),
        });
    }
    oracle.overrides.insert(point.to_vec(), value);
    Ok(oracle)
}

/// Estimates the reprogrammed fraction of a semi-constant oracle by querying
/// `sample_count` random inputs and counting answers equal to the constant.
pub fn sc_fraction_estimate<R: rand::Rng + ?Sized>(
    oracle: &SemiConstantOracle,
    sample_count: usize,
    rng: &mut R,
) -> f64 {
    debug_assert!(sample_count >= 1000, "estimates need at least 10^3 samples");
    let mut hits = 0usize;
    let mut input = [0u8; 16];
    for _ in 0..sample_count {
        rng.fill_bytes(&mut input);
        if oracle.eval(&input) == oracle.y_star {
            hits += 1;
        }
    }
    hits as f64 / sample_count as f64
}
