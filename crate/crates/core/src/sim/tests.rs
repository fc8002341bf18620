#![allow(clippy::needless_range_loop)]

use super::*;
use crate::compile;
use crate::kir::{bind, BaseGate, Control, GateOp, Kernel, Predicate};
use num_complex::Complex64 as C;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const HDR: &str = "OPENQASM 3.0;\ninclude \"stdgates.inc\";\n";

fn kernel(body: &str) -> Kernel {
    compile(&format!("{HDR}{body}")).unwrap_or_else(|e| panic!("{e}\n{body}"))
}

fn state_of(body: &str) -> StateVector {
    let k = kernel(body);
    statevector(&bind(&k, vec![]).unwrap()).unwrap()
}

fn close(a: C, b: C) -> bool {
    (a - b).norm() < 1e-12
}

/// 6σ binomial half-width around `n·p`.
fn six_sigma(n: u64, p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    6.0 * (n as f64 * p * (1.0 - p)).sqrt()
}

#[test]
fn hadamard_column() {
    let s = state_of("qubit q; h q;");
    let r = C::new(FRAC_1_SQRT_2, 0.0);
    assert!(close(s.amplitudes()[0], r) && close(s.amplitudes()[1], r));
}

#[test]
fn cnot_truth_table() {
    let mut s = StateVector::from_amplitudes(vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]);
    apply_gate(&mut s, &GateOp::new(BaseGate::X, vec![], vec![1]).with_controls(vec![Control::pos(0)]), &[]);
    assert!(close(s.amplitudes()[3], C::new(1.0, 0.0)));
    // Negative control does not fire when q0 = 1.
    apply_gate(&mut s, &GateOp::new(BaseGate::X, vec![], vec![1]).with_controls(vec![Control::neg(0)]), &[]);
    assert!(close(s.amplitudes()[3], C::new(1.0, 0.0)));
}

#[test]
fn rz_on_plus_matches_2x2_oracle() {
    let s = state_of("qubit q; h q; rz(pi/3) q;");
    // Oracle: rz = diag(e^{-iθ/2}, e^{iθ/2}) applied to (1,1)/√2.
    let th = PI / 3.0;
    let want = [C::from_polar(FRAC_1_SQRT_2, -th / 2.0), C::from_polar(FRAC_1_SQRT_2, th / 2.0)];
    assert!(close(s.amplitudes()[0], want[0]) && close(s.amplitudes()[1], want[1]));
    assert!(expval_pauli(&s, "Z").unwrap().abs() < 1e-12);
    let x = 2.0 * (want[0].conj() * want[1]).re;
    assert!((expval_pauli(&s, "X").unwrap() - x).abs() < 1e-12);
    assert!((x - 0.5).abs() < 1e-12);
}

#[test]
fn every_gate_matrix_is_unitary_and_adjoint_inverts() {
    for &g in BaseGate::ALL.iter().filter(|g| **g != BaseGate::Swap) {
        let angles = [0.3, -1.2, 2.1];
        let m = gate_matrix(g, &angles[..g.num_angles()], false);
        let d = gate_matrix(g, &angles[..g.num_angles()], true);
        for r in 0..2 {
            for c in 0..2 {
                let prod: C = (0..2).map(|k| d[r][k] * m[k][c]).sum();
                let id = C::new((r == c) as u8 as f64, 0.0);
                assert!(close(prod, id), "{g:?}");
            }
        }
    }
}

#[test]
fn measure_zero_is_deterministic() {
    let mut s = StateVector::new(1);
    for seed in 0..20 {
        assert_eq!(measure(&mut s, 0, &mut RngStream::new(seed)).unwrap(), 0);
    }
    assert_eq!(s, StateVector::new(1));
}

#[test]
fn bell_collapse() {
    let bell = state_of("qubit[2] q; h q[0]; cx q[0], q[1];");
    let r = FRAC_1_SQRT_2;
    let amps = bell.amplitudes();
    assert!(close(amps[0], C::new(r, 0.0)) && close(amps[3], C::new(r, 0.0)));
    assert!(close(amps[1], C::new(0.0, 0.0)) && close(amps[2], C::new(0.0, 0.0)));
    let mut s = bell.clone();
    assert!((project(&mut s, 0, 1).unwrap() - 0.5).abs() < 1e-12);
    assert!(close(s.amplitudes()[3], C::new(1.0, 0.0)));
    let mut s = StateVector::new(1);
    assert!(matches!(project(&mut s, 0, 1), Err(SimError::DegenerateNorm { .. })));
}

#[test]
fn measure_minus_is_fair() {
    let k = kernel("qubit q; bit c; x q; h q; c = measure q;");
    let bk = bind(&k, vec![]).unwrap();
    let p1 = {
        let s = state_of("qubit q; x q; h q;");
        s.amplitudes()[1].norm_sqr()
    };
    let mut ones = 0u64;
    for shot in 0..10_000 {
        let (store, _) = run_trajectory(&bk, &mut RngStream::for_shot(3, shot)).unwrap();
        ones += u64::from(store.flat_bits()[0]);
    }
    assert!((ones as f64 - 10_000.0 * p1).abs() <= 200.0, "{ones}");
}

#[test]
fn reset_cases() {
    for prep in ["x q[0];", "h q[0];", "h q[0]; cx q[0], q[1];"] {
        for seed in 0..16 {
            let k = kernel(&format!("qubit[2] q; {prep}"));
            let mut s = statevector(&bind(&k, vec![]).unwrap()).unwrap();
            reset(&mut s, 0, &mut RngStream::new(seed)).unwrap();
            assert!(s.prob_one(0) < 1e-12);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            // The Bell partner is left in a definite state.
            let p = s.prob_one(1);
            assert!(p < 1e-12 || (p - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn conditional_reset_always_lands_on_zero() {
    for prep in ["h q;", "x q; h q;"] {
        let k = kernel(&format!("qubit q; bit c; {prep} c = measure q; if (c == 1) x q;"));
        let bk = bind(&k, vec![]).unwrap();
        for shot in 0..200 {
            let (_, s) = run_trajectory(&bk, &mut RngStream::for_shot(9, shot)).unwrap();
            assert!(s.prob_one(0) < 1e-12);
        }
    }
}

#[test]
fn empty_kernel_runs() {
    let k = kernel("qubit[3] q;");
    let bk = bind(&k, vec![]).unwrap();
    let (store, s) = run_trajectory(&bk, &mut RngStream::new(0)).unwrap();
    assert!(store.flat_bits().is_empty());
    assert_eq!(s, StateVector::new(3));
    let h = sample(&bk, 17, 1).unwrap();
    assert_eq!(h.counts.len(), 1);
    assert_eq!(h.count(""), 17);
    assert_eq!(sample(&bk, 0, 1).unwrap_err(), SimError::ZeroShots);
}

#[test]
fn hadamard_sampling_is_binomial_and_reproducible() {
    let k = kernel("qubit q; bit c; h q; c = measure q;");
    let bk = bind(&k, vec![]).unwrap();
    let a = sample(&bk, 10_000, 42).unwrap();
    assert!((a.count("0") as f64 - 5000.0).abs() <= 300.0);
    assert_eq!(a.count("0") + a.count("1"), 10_000);
    assert_eq!(a, sample(&bk, 10_000, 42).unwrap());
    for workers in [1, 2, 3, 8] {
        assert_eq!(a, sample_with_workers(&bk, 10_000, 42, workers).unwrap());
    }
}

#[test]
fn statevector_rejects_dynamic_kernels() {
    for body in ["qubit q; bit c; c = measure q;", "qubit q; reset q;"] {
        let k = kernel(body);
        assert_eq!(statevector(&bind(&k, vec![]).unwrap()).unwrap_err(), SimError::DynamicCircuit);
    }
}

#[test]
fn qft_matches_dft_oracle() {
    // Textbook QFT on q[2..0] with q[0] least significant, ending in a bit-reversal swap.
    let qft = "qubit[3] q; x q[0]; \
               h q[2]; cp(pi/2) q[1], q[2]; cp(pi/4) q[0], q[2]; \
               h q[1]; cp(pi/2) q[0], q[1]; h q[0]; swap q[0], q[2];";
    let s = state_of(qft);
    // DFT of e1: amplitude_k = ω^{k}/√8 with ω = e^{2πi/8}.
    for k in 0..8 {
        let want = C::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * k as f64 / 8.0);
        assert!(close(s.amplitudes()[k], want), "k={k}: {:?} vs {want:?}", s.amplitudes()[k]);
    }
}

#[test]
fn pauli_expectations() {
    let bell = state_of("qubit[2] q; h q[0]; cx q[0], q[1];");
    assert!((expval_pauli(&bell, "ZZ").unwrap() - 1.0).abs() < 1e-12);
    assert!((expval_pauli(&bell, "XX").unwrap() - 1.0).abs() < 1e-12);
    assert!((expval_pauli(&bell, "YY").unwrap() + 1.0).abs() < 1e-12);
    assert!(expval_pauli(&bell, "ZI").unwrap().abs() < 1e-12);
    assert!((expval_pauli(&bell, "II").unwrap() - 1.0).abs() < 1e-12);
    let s = state_of("qubit[2] q; ry(pi/3) q[0];");
    assert!((expval_pauli(&s, "ZI").unwrap() - 0.5).abs() < 1e-12);
    assert!((expval_pauli(&s, "IZ").unwrap() - 1.0).abs() < 1e-12);
    let s = state_of("qubit q; h q; s q;");
    assert!((expval_pauli(&s, "Y").unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(expval_pauli(&s, "ZZ"), Err(SimError::BadPauliString { .. })));
    assert!(matches!(expval_pauli(&s, "Q"), Err(SimError::BadPauliString { .. })));
}

#[test]
fn store_key_and_register_value() {
    let k = kernel("qubit[3] q; bit[2] a; bit b; x q[0]; x q[2]; a[0] = measure q[0]; a[1] = measure q[1]; b = measure q[2];");
    let bk = bind(&k, vec![]).unwrap();
    let (store, _) = run_trajectory(&bk, &mut RngStream::new(0)).unwrap();
    assert_eq!(store.key(), "101");
    assert_eq!(store.register_value(0), 0b10);
    assert_eq!(sample(&bk, 5, 0).unwrap().count("101"), 5);
}

#[test]
fn register_predicates_read_bit_zero_as_msb() {
    // a = [1, 0] reads as 2.
    let k = kernel("qubit[3] q; bit[2] a; bit b; x q[0]; a[0] = measure q[0]; a[1] = measure q[1]; if (a == 2) x q[2]; b = measure q[2];");
    let bk = bind(&k, vec![]).unwrap();
    assert_eq!(sample(&bk, 10, 0).unwrap().count("101"), 10);
}

#[test]
fn nested_conditionals_and_else() {
    let k = kernel(
        "qubit[3] q; bit[3] c; x q[0]; c[0] = measure q[0]; c[1] = measure q[1]; \
         if (c[0]) { if (c[1]) { x q[2]; } else { x q[2]; x q[1]; } } else { x q[2]; } c[2] = measure q[2]; c[1] = measure q[1];",
    );
    let bk = bind(&k, vec![]).unwrap();
    assert_eq!(sample(&bk, 10, 0).unwrap().count("111"), 10);
}

struct Checker {
    ops: usize,
    branches: usize,
}

impl Observer for Checker {
    fn after_op(&mut self, s: &StateVector) {
        self.ops += 1;
        assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
    }
    fn branch(&mut self, p: &Predicate, store: &ClassicalStore, took_then: bool) {
        self.branches += 1;
        assert_eq!(p.evaluate(store.subject_value(p.subject)), took_then);
    }
}

#[test]
fn teleport_trajectories_satisfy_invariants() {
    let k = kernel(
        "qubit[3] q; bit[2] c; bit r; U(1.1, 0.4, -0.7) q[0]; h q[1]; cx q[1], q[2]; cx q[0], q[1]; h q[0]; \
         c[0] = measure q[0]; c[1] = measure q[1]; if (c[1] == 1) x q[2]; if (c[0] == 1) z q[2]; \
         inv @ U(1.1, 0.4, -0.7) q[2]; r = measure q[2];",
    );
    let bk = bind(&k, vec![]).unwrap();
    let mut seen = std::collections::HashSet::new();
    for shot in 0..400 {
        let mut chk = Checker { ops: 0, branches: 0 };
        let (store, s) = run_trajectory_observed(&bk, &mut RngStream::for_shot(5, shot), &mut chk).unwrap();
        assert_eq!(chk.branches, 2);
        assert!(chk.ops > 0);
        assert_eq!(store.flat_bits()[2], 0);
        assert!(s.prob_one(2) < 1e-12);
        seen.insert(store.register_value(0));
    }
    assert_eq!(seen.len(), 4, "all four correction branches exercised");
}

#[test]
fn fast_path_selection() {
    assert!(is_sampleable_once(&kernel("qubit[2] q; bit[2] c; h q[0]; c[0] = measure q[0]; h q[1]; c[1] = measure q[1];")));
    assert!(!is_sampleable_once(&kernel("qubit[2] q; bit c; h q[0]; c = measure q[0]; cx q[0], q[1];")));
    assert!(!is_sampleable_once(&kernel("qubit q; reset q;")));
    assert!(!is_sampleable_once(&kernel("qubit q; bit c; c = measure q; if (c) x q;")));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn gate_line() -> impl Strategy<Value = String> {
        let q = 0usize..3;
        prop_oneof![
            (proptest::sample::select(vec!["h", "x", "y", "z", "s", "sdg", "t", "sx"]), q.clone()).prop_map(|(g, a)| format!("{g} q[{a}];")),
            (proptest::sample::select(vec!["rx", "ry", "rz", "p"]), -PI..PI, q.clone()).prop_map(|(g, t, a)| format!("{g}({t}) q[{a}];")),
            (q.clone(), 1usize..3).prop_map(|(a, d)| format!("cx q[{a}], q[{}];", (a + d) % 3)),
            (q.clone(), 1usize..3, -PI..PI).prop_map(|(a, d, t)| format!("crz({t}) q[{a}], q[{}];", (a + d) % 3)),
            (q, 1usize..3).prop_map(|(a, d)| format!("swap q[{a}], q[{}];", (a + d) % 3)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn normalization_holds_after_every_op(lines in prop::collection::vec(gate_line(), 1..30), seed in any::<u64>()) {
            let body = format!(
                "qubit[3] q; bit[3] c; {} c[0] = measure q[0]; if (c[0]) {{ {} }} reset q[1]; c[1] = measure q[1];",
                lines.join(" "),
                lines.iter().rev().take(3).cloned().collect::<Vec<_>>().join(" ")
            );
            let k = kernel(&body);
            let bk = bind(&k, vec![]).unwrap();
            let mut chk = Checker { ops: 0, branches: 0 };
            let (store, s) = run_trajectory_observed(&bk, &mut RngStream::new(seed), &mut chk).unwrap();
            prop_assert_eq!(chk.branches, 1);
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
            prop_assert_eq!(store.flat_bits()[1], 0);
        }

        #[test]
        fn identical_seed_and_shot_give_identical_trajectory(lines in prop::collection::vec(gate_line(), 1..20), seed in any::<u64>(), shot in 0u64..1000) {
            let k = kernel(&format!("qubit[3] q; bit[3] c; {} c = measure q;", lines.join(" ")));
            let bk = bind(&k, vec![]).unwrap();
            let a = run_trajectory(&bk, &mut RngStream::for_shot(seed, shot)).unwrap();
            let b = run_trajectory(&bk, &mut RngStream::for_shot(seed, shot)).unwrap();
            prop_assert_eq!(a.0, b.0);
            prop_assert_eq!(a.1, b.1);
        }

        #[test]
        fn fast_path_agrees_with_trajectories(lines in prop::collection::vec(gate_line(), 1..15)) {
            // Same kernel, once static and once forced onto trajectories by a trailing no-op reset.
            let body = format!("qubit[4] q; bit[3] c; {} c[0] = measure q[0]; c[1] = measure q[1]; c[2] = measure q[2];", lines.join(" "));
            let fast = kernel(&body);
            let slow = kernel(&format!("{body} reset q[3];"));
            prop_assert!(is_sampleable_once(&fast) && !is_sampleable_once(&slow));
            let shots = 4000;
            let a = sample(&bind(&fast, vec![]).unwrap(), shots, 11).unwrap();
            let b = sample(&bind(&slow, vec![]).unwrap(), shots, 12).unwrap();
            let probs = statevector(&bind(&kernel(&format!("qubit[4] q; {}", lines.join(" "))), vec![]).unwrap()).unwrap().probabilities();
            for idx in 0..8usize {
                let key: String = (0..3).map(|q| if (idx >> q) & 1 == 1 { '1' } else { '0' }).collect();
                let p = probs[idx] + probs[idx + 8];
                let bound = six_sigma(shots, p) + 1.0;
                prop_assert!((a.count(&key) as f64 - shots as f64 * p).abs() <= bound, "{key} {p} {:?}", a);
                prop_assert!((b.count(&key) as f64 - shots as f64 * p).abs() <= bound);
            }
        }
    }
}
