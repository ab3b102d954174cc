//! Statevectors over an input/answer/work register split and the XOR
//! oracle acting on them.

use num_complex::Complex64;
use rand::Rng;

use crate::QsimError;

/// Hard cap on total register width; states are dense.
pub const MAX_QUBITS: usize = 16;

/// A normalized complex amplitude vector over the computational basis of
/// an a-qubit input register, b-qubit answer register and w-qubit work
/// register. The input register occupies the most significant index bits.
#[derive(Clone, Debug)]
pub struct StateVector {
    input_bits: usize,
    answer_bits: usize,
    work_bits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(input_bits: usize, answer_bits: usize, work_bits: usize) -> Self {
        let total = input_bits + answer_bits + work_bits;
        assert!(
            (1..=MAX_QUBITS).contains(&total),
            "register width out of range"
        );
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector {
            input_bits,
            answer_bits,
            work_bits,
            amps,
        }
    }

    /// A computational basis state |x>|y>|z>.
    pub fn basis_state(
        input_bits: usize,
        answer_bits: usize,
        work_bits: usize,
        x: u64,
        y: u64,
        z: u64,
    ) -> Self {
        let mut s = Self::zero_state(input_bits, answer_bits, work_bits);
        assert!(x < 1 << input_bits && y < 1 << answer_bits && (work_bits > 0 || z == 0));
        let idx =
            ((x as usize) << (answer_bits + work_bits)) | ((y as usize) << work_bits) | z as usize;
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[idx] = Complex64::new(1.0, 0.0);
        s
    }

    /// Builds a state from raw amplitudes, checking normalization.
    pub fn from_amplitudes(
        input_bits: usize,
        answer_bits: usize,
        work_bits: usize,
        amps: Vec<Complex64>,
    ) -> Result<Self, QsimError> {
        let total = input_bits + answer_bits + work_bits;
        if total == 0 || total > MAX_QUBITS {
            return Err(QsimError::RegisterTooLarge {
                qubits: total,
                max: MAX_QUBITS,
            });
        }
        if amps.len() != 1 << total {
            return Err(QsimError::ShapeMismatch(
                "amplitude vector length must be 2^total",
            ));
        }
        let state = StateVector {
            input_bits,
            answer_bits,
            work_bits,
            amps,
        };
        if (state.norm() - 1.0).abs() > 1e-10 {
            return Err(QsimError::ShapeMismatch("state is not normalized"));
        }
        Ok(state)
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn answer_bits(&self) -> usize {
        self.answer_bits
    }

    pub fn work_bits(&self) -> usize {
        self.work_bits
    }

    pub fn total_qubits(&self) -> usize {
        self.input_bits + self.answer_bits + self.work_bits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, idx: usize) -> Complex64 {
        self.amps[idx]
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Euclidean distance to another state of the same dimension.
    pub fn distance(&self, other: &StateVector) -> Result<f64, QsimError> {
        if self.dim() != other.dim() {
            return Err(QsimError::ShapeMismatch("states differ in dimension"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Probability mass of one computational basis outcome.
    pub fn outcome_probability(&self, idx: usize) -> f64 {
        self.amps[idx].norm_sqr()
    }

    /// Samples one computational-basis measurement.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u = rng.gen::<f64>();
        for (idx, a) in self.amps.iter().enumerate() {
            u -= a.norm_sqr();
            if u <= 0.0 {
                return idx;
            }
        }
        self.amps.len() - 1
    }

    /// Value of qubit `q` in a basis index (qubit 0 is the first input
    /// qubit, i.e. the most significant index bit).
    pub fn qubit_of_index(&self, idx: usize, q: usize) -> u8 {
        ((idx >> (self.total_qubits() - 1 - q)) & 1) as u8
    }
}

/// A total function {0,1}^a -> {0,1}^b as a dense table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTable {
    input_bits: usize,
    output_bits: usize,
    entries: Vec<u64>,
}

impl OracleTable {
    pub fn new(
        input_bits: usize,
        output_bits: usize,
        entries: Vec<u64>,
    ) -> Result<Self, QsimError> {
        if entries.len() != 1 << input_bits {
            return Err(QsimError::ShapeMismatch("table must have 2^a entries"));
        }
        if entries.iter().any(|&v| v >= 1 << output_bits) {
            return Err(QsimError::ShapeMismatch("table entry exceeds output range"));
        }
        Ok(OracleTable {
            input_bits,
            output_bits,
            entries,
        })
    }

    pub fn uniform<R: Rng + ?Sized>(input_bits: usize, output_bits: usize, rng: &mut R) -> Self {
        let entries = (0..1u64 << input_bits)
            .map(|_| rng.gen_range(0..1u64 << output_bits))
            .collect();
        OracleTable {
            input_bits,
            output_bits,
            entries,
        }
    }

    /// Draws from the semi-constant distribution: one designated value is
    /// returned on an independent delta-fraction of inputs, everything
    /// else is fresh uniform.
    pub fn semi_constant<R: Rng + ?Sized>(
        input_bits: usize,
        output_bits: usize,
        delta: f64,
        rng: &mut R,
    ) -> Self {
        let y_star = rng.gen_range(0..1u64 << output_bits);
        let entries = (0..1u64 << input_bits)
            .map(|_| {
                if rng.gen::<f64>() < delta {
                    y_star
                } else {
                    rng.gen_range(0..1u64 << output_bits)
                }
            })
            .collect();
        OracleTable {
            input_bits,
            output_bits,
            entries,
        }
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn get(&self, x: u64) -> u64 {
        self.entries[x as usize]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn set(&mut self, x: u64, v: u64) {
        assert!(v < 1 << self.output_bits);
        self.entries[x as usize] = v;
    }
}

/// Applies the XOR oracle |x>|y>|z> -> |x>|y xor O(x)>|z>, a permutation
/// of amplitudes that is its own inverse.
pub fn apply_oracle(state: &StateVector, table: &OracleTable) -> Result<StateVector, QsimError> {
    if table.input_bits != state.input_bits || table.output_bits != state.answer_bits {
        return Err(QsimError::ShapeMismatch(
            "oracle registers do not match the state",
        ));
    }
    let (b, w) = (state.answer_bits, state.work_bits);
    let mut out = state.clone();
    let answer_mask = ((1usize << b) - 1) << w;
    for (idx, &amp) in state.amps.iter().enumerate() {
        let x = (idx >> (b + w)) as u64;
        let patch = (table.get(x) as usize) << w;
        let target = (idx & !answer_mask) | ((idx ^ patch) & answer_mask);
        out.amps[target] = amp;
    }
    Ok(out)
}

/// Magnitude squared of input value `x` summed over the answer and work
/// registers; over all x these form a probability distribution.
pub fn query_magnitude(state: &StateVector, x: u64) -> f64 {
    assert!(
        (x as usize) < 1 << state.input_bits,
        "input value out of range"
    );
    let (b, w) = (state.answer_bits, state.work_bits);
    let lo = (x as usize) << (b + w);
    let hi = ((x as usize) + 1) << (b + w);
    state.amps[lo..hi].iter().map(|a| a.norm_sqr()).sum()
}

/// Euclidean distance and the total variation distance between the two
/// states' computational-basis measurement distributions.
pub fn tv_after_measurement(s1: &StateVector, s2: &StateVector) -> Result<(f64, f64), QsimError> {
    let euclid = s1.distance(s2)?;
    let tv = 0.5
        * s1.amps
            .iter()
            .zip(&s2.amps)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .sum::<f64>();
    debug_assert!(tv <= 4.0 * euclid + 1e-12);
    Ok((euclid, tv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn oracle_is_self_inverse() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let table = OracleTable::uniform(3, 2, &mut rng);
        let mut state = StateVector::zero_state(3, 2, 1);
        // Random normalized state.
        for a in state.amps_mut() {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let n = state.norm();
        for a in state.amps_mut() {
            *a /= n;
        }
        let once = apply_oracle(&state, &table).unwrap();
        assert!((once.norm() - 1.0).abs() < 1e-12);
        let twice = apply_oracle(&once, &table).unwrap();
        assert!(state.distance(&twice).unwrap() < 1e-12);
    }

    #[test]
    fn basis_state_maps_to_its_image() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let table = OracleTable::uniform(3, 2, &mut rng);
        for x in 0..8u64 {
            let state = StateVector::basis_state(3, 2, 0, x, 0, 0);
            let mapped = apply_oracle(&state, &table).unwrap();
            let expect = StateVector::basis_state(3, 2, 0, x, table.get(x), 0);
            assert!(mapped.distance(&expect).unwrap() < 1e-12);
        }
    }

    #[test]
    fn query_magnitudes_sum_to_one() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut state = StateVector::zero_state(4, 1, 1);
        for a in state.amps_mut() {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let n = state.norm();
        for a in state.amps_mut() {
            *a /= n;
        }
        let total: f64 = (0..16).map(|x| query_magnitude(&state, x)).sum();
        assert!((total - 1.0).abs() < 1e-10);

        let basis = StateVector::basis_state(4, 1, 1, 7, 0, 0);
        assert!((query_magnitude(&basis, 7) - 1.0).abs() < 1e-12);
        assert!(query_magnitude(&basis, 3) < 1e-12);
    }

    #[test]
    fn orthogonal_states_have_unit_tv() {
        let s0 = StateVector::basis_state(1, 0, 0, 0, 0, 0);
        let s1 = StateVector::basis_state(1, 0, 0, 1, 0, 0);
        let (euclid, tv) = tv_after_measurement(&s0, &s1).unwrap();
        assert!((euclid - 2f64.sqrt()).abs() < 1e-12);
        assert!((tv - 1.0).abs() < 1e-12);
        let (e0, t0) = tv_after_measurement(&s0, &s0).unwrap();
        assert_eq!((e0, t0), (0.0, 0.0));
    }
}
