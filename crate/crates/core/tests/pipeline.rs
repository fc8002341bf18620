//! End-to-end runs of the corpus programs through the public API.

mod common;

use common::*;
use qasm2cudaq::harness::{fidelity_up_to_global_phase, oracle_unitary};
use qasm2cudaq::kir::{bind, lower_count};
use qasm2cudaq::sim::{sample, statevector, StateVector};

#[test]
fn static_corpus_programs_match_oracle() {
    for (case, params) in [("modifiers", vec![]), ("hea_params", vec![0.3, -0.7, 1.9, 2.4, -1.1])] {
        let k = qasm2cudaq::compile(&program(case)).unwrap();
        let bk = bind(&k, params).unwrap();
        let sv = statevector(&bk).unwrap();
        let expected = StateVector::from_amplitudes(oracle_unitary(&bk).unwrap().column(0));
        assert!(fidelity_up_to_global_phase(&sv, &expected).unwrap() >= 1.0 - 1e-10, "{case}");
    }
}

#[test]
fn teleport_program_returns_to_zero() {
    let k = qasm2cudaq::compile(&program("teleport")).unwrap();
    let h = sample(&bind(&k, vec![]).unwrap(), 2000, 17).unwrap();
    // Keys are c[0] c[1] r.
    assert!(h.counts.keys().all(|key| key.ends_with('0')), "{:?}", h.counts);
    assert_eq!(h.counts.len(), 4);
}

#[test]
fn if_else_program_distribution() {
    let k = qasm2cudaq::compile(&program("feedforward_if_else")).unwrap();
    let shots = 8000;
    let h = sample(&bind(&k, vec![]).unwrap(), shots, 23).unwrap();
    // Keys are c out[0] out[1]. Branch c=1 leaves q[1] in |1⟩; c=0 leaves it in |+⟩ up to phase.
    let ones: u64 = h.counts.iter().filter(|(key, _)| key.as_bytes()[2] == b'1').map(|(_, n)| n).sum();
    assert!((ones as f64 - 0.75 * shots as f64).abs() <= six_sigma(shots, 0.75));
    assert!(h.counts.iter().all(|(key, _)| key.as_bytes()[0] == key.as_bytes()[1]), "out[0] repeats c");
}

#[test]
fn reset_program_clears_qubit_zero() {
    let k = qasm2cudaq::compile(&program("gates_loops_reset")).unwrap();
    let h = sample(&bind(&k, vec![]).unwrap(), 1000, 2).unwrap();
    assert!(h.counts.keys().all(|key| key.starts_with('0')));
}

#[test]
fn rebinding_does_not_relower() {
    let before = lower_count();
    let k = qasm2cudaq::compile(&program("hea_params")).unwrap();
    for i in 0..20 {
        let x = i as f64 * 0.1;
        statevector(&bind(&k, vec![x, x, x, x, x]).unwrap()).unwrap();
    }
    assert_eq!(lower_count() - before, 1);
}
