//! Small exact statevector simulator for oracle-query experiments.
//!
//! The point is not general quantum simulation: registers cap at sixteen
//! qubits and everything is dense and double precision. What the crate
//! checks, at sizes where exact computation is possible, is the handful of
//! quantitative facts about quantum oracle access that security reductions
//! lean on: measuring close states gives close distributions, low query
//! mass on a set of inputs bounds the damage of swapping their answers,
//! and semi-constant reprogramming is hard to notice.

mod circuit;
mod experiment;
mod state;
pub mod textfmt;

pub use circuit::{random_circuit, Circuit, Gate};
pub use experiment::{
    distinguisher_family, random_experiment, run_bbbv_experiment, run_sc_distinguisher,
    sc_distinguishing_bound, sc_sampling_error, QueryExperiment, QueryPerturbation,
};
pub use state::{
    apply_oracle, query_magnitude, tv_after_measurement, OracleTable, StateVector, MAX_QUBITS,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("register request of {qubits} qubits exceeds the cap of {max}")]
    RegisterTooLarge { qubits: usize, max: usize },
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
