//! Circuits over the universal gate set {Hadamard, phase, CNOT, pi/8}.

use num_complex::Complex64;
use rand::Rng;

use crate::state::StateVector;
use crate::QsimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    /// Phase gate S = diag(1, i).
    S(usize),
    /// pi/8 gate T = diag(1, e^{i pi/4}).
    T(usize),
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::T(q) => q,
            Gate::Cnot { control, target } => control.max(target),
        }
    }
}

/// A gate list applied in order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn identity() -> Self {
        Circuit { gates: Vec::new() }
    }

    pub fn new(gates: Vec<Gate>) -> Self {
        Circuit { gates }
    }

    /// X on one qubit, composed from the universal set: H S S H.
    pub fn push_x(&mut self, qubit: usize) {
        self.gates.extend([
            Gate::H(qubit),
            Gate::S(qubit),
            Gate::S(qubit),
            Gate::H(qubit),
        ]);
    }

    /// Hadamard on a range of qubits.
    pub fn push_h_layer(&mut self, qubits: std::ops::Range<usize>) {
        self.gates.extend(qubits.map(Gate::H));
    }

    pub fn validate(&self, total_qubits: usize) -> Result<(), QsimError> {
        for g in &self.gates {
            if g.max_qubit() >= total_qubits {
                return Err(QsimError::ShapeMismatch("gate qubit index out of range"));
            }
            if let Gate::Cnot { control, target } = g {
                if control == target {
                    return Err(QsimError::ShapeMismatch("cnot control equals target"));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        let mut out = state.clone();
        for g in &self.gates {
            apply_gate(&mut out, *g, false);
        }
        out
    }

    /// The adjoint circuit: gates reversed and conjugated.
    pub fn apply_inverse(&self, state: &StateVector) -> StateVector {
        let mut out = state.clone();
        for g in self.gates.iter().rev() {
            apply_gate(&mut out, *g, true);
        }
        out
    }

    /// Max deviation of U Udagger from the identity over all basis states.
    /// Dense check; meant for small registers.
    pub fn unitarity_defect(&self, total_qubits: usize) -> f64 {
        let dim = 1usize << total_qubits;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            let mut basis = StateVector::zero_state(total_qubits, 0, 0);
            basis.amps_mut()[0] = Complex64::new(0.0, 0.0);
            basis.amps_mut()[i] = Complex64::new(1.0, 0.0);
            let round = self.apply_inverse(&self.apply(&basis));
            worst = worst.max(basis.distance(&round).unwrap());
        }
        worst
    }
}

fn apply_gate(state: &mut StateVector, gate: Gate, inverse: bool) {
    let total = state.total_qubits();
    let mask_of = |q: usize| 1usize << (total - 1 - q);
    match gate {
        Gate::H(q) => {
            let mask = mask_of(q);
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            let amps = state.amps_mut();
            for idx in 0..amps.len() {
                if idx & mask == 0 {
                    let a = amps[idx];
                    let b = amps[idx | mask];
                    amps[idx] = (a + b) * inv_sqrt2;
                    amps[idx | mask] = (a - b) * inv_sqrt2;
                }
            }
        }
        Gate::S(q) => {
            let mask = mask_of(q);
            let phase = if inverse {
                Complex64::new(0.0, -1.0)
            } else {
                Complex64::new(0.0, 1.0)
            };
            for (idx, a) in state.amps_mut().iter_mut().enumerate() {
                if idx & mask != 0 {
                    *a *= phase;
                }
            }
        }
        Gate::T(q) => {
            let mask = mask_of(q);
            let angle = if inverse {
                -std::f64::consts::FRAC_PI_4
            } else {
                std::f64::consts::FRAC_PI_4
            };
            let phase = Complex64::from_polar(1.0, angle);
            for (idx, a) in state.amps_mut().iter_mut().enumerate() {
                if idx & mask != 0 {
                    *a *= phase;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let cmask = mask_of(control);
            let tmask = mask_of(target);
            let amps = state.amps_mut();
            for idx in 0..amps.len() {
                if idx & cmask != 0 && idx & tmask == 0 {
                    amps.swap(idx, idx | tmask);
                }
            }
        }
    }
}

/// A random circuit of the given depth: each layer places one uniformly
/// chosen gate per qubit slot from the universal set.
pub fn random_circuit<R: Rng + ?Sized>(total_qubits: usize, depth: usize, rng: &mut R) -> Circuit {
    assert!(depth <= 20, "random circuits stay shallow");
    let mut gates = Vec::new();
    for _ in 0..depth {
        for q in 0..total_qubits {
            match rng.gen_range(0..4) {
                0 => gates.push(Gate::H(q)),
                1 => gates.push(Gate::S(q)),
                2 => gates.push(Gate::T(q)),
                _ => {
                    if total_qubits >= 2 {
                        let other = loop {
                            let o = rng.gen_range(0..total_qubits);
                            if o != q {
                                break o;
                            }
                        };
                        gates.push(Gate::Cnot {
                            control: q,
                            target: other,
                        });
                    } else {
                        gates.push(Gate::H(q));
                    }
                }
            }
        }
    }
    Circuit { gates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn hadamard_builds_uniform_superposition() {
        let mut c = Circuit::identity();
        c.push_h_layer(0..3);
        let state = c.apply(&StateVector::zero_state(3, 0, 0));
        let expect = 1.0 / 8f64.sqrt();
        for idx in 0..8 {
            assert!((state.amplitude(idx).re - expect).abs() < 1e-12);
            assert!(state.amplitude(idx).im.abs() < 1e-12);
        }
    }

    #[test]
    fn x_composition_flips_a_qubit() {
        let mut c = Circuit::identity();
        c.push_x(1);
        let state = c.apply(&StateVector::zero_state(2, 0, 0));
        // |01> up to global phase.
        assert!((state.outcome_probability(0b01) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_circuits_are_unitary_and_norm_preserving() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..20 {
            let c = random_circuit(5, 12, &mut rng);
            c.validate(5).unwrap();
            assert!(c.unitarity_defect(5) < 1e-9);
            let state = c.apply(&StateVector::zero_state(5, 0, 0));
            assert!((state.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bad_gate_indices_are_rejected() {
        let c = Circuit::new(vec![Gate::H(3)]);
        assert!(c.validate(3).is_err());
        let c = Circuit::new(vec![Gate::Cnot {
            control: 1,
            target: 1,
        }]);
        assert!(c.validate(3).is_err());
    }
}
