//! Trajectory state-vector simulator for kernel IR.
//!
//! Static kernels are simulated once and sampled from the final
//! distribution. Anything with conditionals, resets or gates after a
//! measurement runs one trajectory per shot.

mod rng;
mod run;
mod state;

use thiserror::Error;

pub use rng::{mix, splitmix64, RngStream};
pub use run::{
    is_sampleable_once, project, run_trajectory, run_trajectory_observed, sample, sample_with_workers, statevector,
    ClassicalStore, Observer, ShotHistogram,
};
pub use state::{apply_gate, collapse, expval_pauli, gate_matrix, measure, reset, Mat2, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("measurement of qubit {qubit} selected an outcome of probability {probability:e}")]
    DegenerateNorm { qubit: usize, probability: f64 },
    #[error("kernel measures, resets or branches; use sampling instead of a final state vector")]
    DynamicCircuit,
    #[error("bad Pauli string: {reason}")]
    BadPauliString { reason: String },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("could not start worker pool: {0}")]
    Workers(String),
}

#[cfg(test)]
mod tests;
