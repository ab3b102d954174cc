//! Oracle-query experiments: interleaved unitaries and oracle calls, the
//! query-mass/final-state-distance measurement, and the semi-constant
//! distinguishing experiment.

use std::collections::BTreeSet;

use rand::Rng;

use crate::circuit::{random_circuit, Circuit};
use crate::state::{apply_oracle, query_magnitude, OracleTable, StateVector, MAX_QUBITS};
use crate::QsimError;

/// A sequence U_1, O, U_2, O, ..., U_{T+1} over the three registers,
/// together with the set S of (step, input) pairs where the oracle may be
/// swapped out.
#[derive(Clone, Debug)]
pub struct QueryExperiment {
    pub input_bits: usize,
    pub answer_bits: usize,
    pub work_bits: usize,
    /// T+1 circuits; oracle calls sit between consecutive entries.
    pub unitaries: Vec<Circuit>,
    /// (step, input) pairs; steps are 1-based.
    pub modified_set: BTreeSet<(usize, u64)>,
}

impl QueryExperiment {
    /// Number of oracle calls T.
    pub fn step_count(&self) -> usize {
        self.unitaries.len().saturating_sub(1)
    }

    pub fn total_qubits(&self) -> usize {
        self.input_bits + self.answer_bits + self.work_bits
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        let total = self.total_qubits();
        if total == 0 || total > MAX_QUBITS {
            return Err(QsimError::RegisterTooLarge {
                qubits: total,
                max: MAX_QUBITS,
            });
        }
        if self.step_count() < 1 {
            return Err(QsimError::ShapeMismatch(
                "experiment needs at least one oracle call",
            ));
        }
        for u in &self.unitaries {
            u.validate(total)?;
        }
        for &(t, x) in &self.modified_set {
            if t < 1 || t > self.step_count() {
                return Err(QsimError::ShapeMismatch("modified step out of range"));
            }
            if x >= 1 << self.input_bits {
                return Err(QsimError::ShapeMismatch("modified input out of range"));
            }
        }
        Ok(())
    }

    /// Runs the experiment against one fixed table.
    pub fn run(&self, table: &OracleTable) -> Result<StateVector, QsimError> {
        self.validate()?;
        let mut state = StateVector::zero_state(self.input_bits, self.answer_bits, self.work_bits);
        for (t, u) in self.unitaries.iter().enumerate() {
            state = u.apply(&state);
            if t + 1 < self.unitaries.len() {
                state = apply_oracle(&state, table)?;
            }
        }
        Ok(state)
    }
}

/// Outcome of one query-perturbation run.
#[derive(Clone, Copy, Debug)]
pub struct QueryPerturbation {
    /// Total query mass on the modified set, measured on the unmodified run.
    pub eps_sum: f64,
    /// Euclidean distance between the two final states.
    pub distance: f64,
    /// distance / sqrt(T * eps_sum); absent when the mass is zero.
    pub ratio: Option<f64>,
}

/// Runs the experiment twice — against `table`, and against the oracle
/// that answers inputs of the modified set at their modified steps from
/// `modified_table` — and measures the query mass and final-state
/// distance.
pub fn run_bbbv_experiment(
    exp: &QueryExperiment,
    table: &OracleTable,
    modified_table: &OracleTable,
) -> Result<QueryPerturbation, QsimError> {
    exp.validate()?;
    if table.input_bits() != exp.input_bits || table.output_bits() != exp.answer_bits {
        return Err(QsimError::ShapeMismatch(
            "table registers do not match the experiment",
        ));
    }
    if modified_table.input_bits() != table.input_bits()
        || modified_table.output_bits() != table.output_bits()
    {
        return Err(QsimError::ShapeMismatch(
            "modified table registers do not match",
        ));
    }
    // The tables may differ only on inputs named in the modified set.
    let touched: BTreeSet<u64> = exp.modified_set.iter().map(|&(_, x)| x).collect();
    for x in 0..1u64 << exp.input_bits {
        if table.get(x) != modified_table.get(x) && !touched.contains(&x) {
            return Err(QsimError::ShapeMismatch(
                "tables differ outside the modified set",
            ));
        }
    }

    let t_count = exp.step_count();
    let mut eps_sum = 0.0;
    let mut plain = StateVector::zero_state(exp.input_bits, exp.answer_bits, exp.work_bits);
    let mut perturbed = plain.clone();
    for (i, u) in exp.unitaries.iter().enumerate() {
        plain = u.apply(&plain);
        perturbed = u.apply(&perturbed);
        if i + 1 < exp.unitaries.len() {
            let step = i + 1;
            for &(t, x) in &exp.modified_set {
                if t == step {
                    eps_sum += query_magnitude(&plain, x);
                }
            }
            plain = apply_oracle(&plain, table)?;
            let effective = step_table(exp, table, modified_table, step);
            perturbed = apply_oracle(&perturbed, &effective)?;
        }
    }
    let distance = plain.distance(&perturbed)?;
    let ratio = if eps_sum > 1e-15 {
        Some(distance / (t_count as f64 * eps_sum).sqrt())
    } else {
        None
    };
    Ok(QueryPerturbation {
        eps_sum,
        distance,
        ratio,
    })
}

fn step_table(
    exp: &QueryExperiment,
    table: &OracleTable,
    modified_table: &OracleTable,
    step: usize,
) -> OracleTable {
    let mut eff = table.clone();
    for &(t, x) in &exp.modified_set {
        if t == step {
            eff.set(x, modified_table.get(x));
        }
    }
    eff
}

/// Empirical distinguishing advantage of an accept-bit experiment between
/// the uniform oracle distribution and the semi-constant one: runs
/// `trials` fresh draws per arm, one measurement each.
pub fn run_sc_distinguisher<R: Rng + ?Sized>(
    exp: &QueryExperiment,
    accept_qubit: usize,
    delta: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64, QsimError> {
    exp.validate()?;
    if accept_qubit >= exp.total_qubits() {
        return Err(QsimError::ShapeMismatch("accept qubit out of range"));
    }
    let mut accept = [0usize; 2];
    for arm in 0..2 {
        for _ in 0..trials {
            let table = if arm == 0 {
                OracleTable::uniform(exp.input_bits, exp.answer_bits, rng)
            } else {
                OracleTable::semi_constant(exp.input_bits, exp.answer_bits, delta, rng)
            };
            let state = exp.run(&table)?;
            let idx = state.measure(rng);
            accept[arm] += state.qubit_of_index(idx, accept_qubit) as usize;
        }
    }
    Ok((accept[0] as f64 - accept[1] as f64).abs() / trials as f64)
}

/// The distinguishing-advantage bound (8/3) q^4 delta^2 for q-query
/// algorithms against semi-constant reprogramming.
pub fn sc_distinguishing_bound(queries: usize, delta: f64) -> f64 {
    let q = queries as f64;
    (8.0 / 3.0) * q * q * q * q * delta * delta
}

/// Two-sided sampling-error envelope added to the bound when comparing
/// against an empirical advantage at the 95% level.
pub fn sc_sampling_error(trials: usize) -> f64 {
    4.0 * (40f64.ln() / trials as f64).sqrt()
}

/// A random experiment: random circuits of depth at most 20 interleaved
/// with `t` oracle calls, and a small random modified set.
pub fn random_experiment<R: Rng + ?Sized>(
    input_bits: usize,
    answer_bits: usize,
    work_bits: usize,
    t: usize,
    rng: &mut R,
) -> QueryExperiment {
    let total = input_bits + answer_bits + work_bits;
    let unitaries = (0..=t)
        .map(|_| random_circuit(total, rng.gen_range(2..=8), rng))
        .collect();
    let mut modified_set = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=3) {
        modified_set.insert((rng.gen_range(1..=t), rng.gen_range(0..1u64 << input_bits)));
    }
    QueryExperiment {
        input_bits,
        answer_bits,
        work_bits,
        unitaries,
        modified_set,
    }
}

/// The fixed family of heuristic semi-constant distinguishers used by the
/// grid checks; each entry is (name, experiment, accept qubit, queries).
pub fn distinguisher_family(
    input_bits: usize,
    answer_bits: usize,
) -> Vec<(&'static str, QueryExperiment, usize)> {
    let a = input_bits;
    let make = |unitaries: Vec<Circuit>| QueryExperiment {
        input_bits: a,
        answer_bits,
        work_bits: 0,
        unitaries,
        modified_set: BTreeSet::new(),
    };

    let mut family = Vec::new();

    // 1. Classical probe: query 0, read the first answer bit.
    family.push((
        "probe-zero",
        make(vec![Circuit::identity(), Circuit::identity()]),
        a, // first answer qubit
    ));

    // 2. Fourier collision test: H-layer, query, H-layer; a constant patch
    //    pulls the input register back toward |0>, read the first input bit.
    let mut pre = Circuit::identity();
    pre.push_h_layer(0..a);
    let mut post = Circuit::identity();
    post.push_h_layer(0..a);
    family.push((
        "fourier-collision",
        make(vec![pre.clone(), post.clone()]),
        0,
    ));

    // 3. Superposed probe: H-layer, query, read the first answer bit.
    family.push((
        "superposed-probe",
        make(vec![pre.clone(), Circuit::identity()]),
        a,
    ));

    // 4. Two-point comparison: query 0 and 1, answers XOR into the same
    //    register; equal answers leave it zero.
    let mut flip_low = Circuit::identity();
    flip_low.push_x(a - 1);
    family.push((
        "two-point-compare",
        make(vec![Circuit::identity(), flip_low, Circuit::identity()]),
        a,
    ));

    // 5. Double Fourier: H, query, H, query, H on the input register.
    family.push((
        "double-fourier",
        make(vec![pre.clone(), pre.clone(), post]),
        0,
    ));

    family
}
