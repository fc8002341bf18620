#![allow(clippy::needless_range_loop)]

use super::*;
use crate::compile;
use crate::frontend::ast::CompareOp;
use num_complex::Complex64 as C;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const HDR: &str = "OPENQASM 3.0;\ninclude \"stdgates.inc\";\n";

fn kernel(body: &str) -> Kernel {
    compile(&format!("{HDR}{body}")).unwrap_or_else(|e| panic!("{e}\n{body}"))
}

fn lower_err(body: &str) -> LowerError {
    match compile(&format!("{HDR}{body}")) {
        Err(crate::Error::Lower(e)) => e,
        other => panic!("expected a lowering error, got {other:?}"),
    }
}

fn gate_ops(k: &Kernel) -> Vec<GateOp> {
    let mut v = Vec::new();
    k.for_each_gate(|g| v.push(g.clone()));
    v
}

// Small dense oracle: its own gate table and a column-by-column product.
type Mat = Vec<Vec<C>>;

fn base_matrix(g: BaseGate, a: &[f64]) -> Mat {
    let c = |re: f64, im: f64| C::new(re, im);
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let e = |t: f64| C::from_polar(1.0, t);
    match g {
        BaseGate::X => vec![vec![z, o], vec![o, z]],
        BaseGate::Y => vec![vec![z, -i], vec![i, z]],
        BaseGate::Z => vec![vec![o, z], vec![z, -o]],
        BaseGate::H => vec![vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]],
        BaseGate::S => vec![vec![o, z], vec![z, i]],
        BaseGate::T => vec![vec![o, z], vec![z, e(PI / 4.0)]],
        BaseGate::Sx => vec![vec![c(0.5, 0.5), c(0.5, -0.5)], vec![c(0.5, -0.5), c(0.5, 0.5)]],
        BaseGate::Rx => {
            let (co, si) = ((a[0] / 2.0).cos(), (a[0] / 2.0).sin());
            vec![vec![c(co, 0.0), c(0.0, -si)], vec![c(0.0, -si), c(co, 0.0)]]
        }
        BaseGate::Ry => {
            let (co, si) = ((a[0] / 2.0).cos(), (a[0] / 2.0).sin());
            vec![vec![c(co, 0.0), c(-si, 0.0)], vec![c(si, 0.0), c(co, 0.0)]]
        }
        BaseGate::Rz => vec![vec![e(-a[0] / 2.0), z], vec![z, e(a[0] / 2.0)]],
        BaseGate::P => vec![vec![o, z], vec![z, e(a[0])]],
        BaseGate::U => {
            let (co, si) = ((a[0] / 2.0).cos(), (a[0] / 2.0).sin());
            vec![
                vec![c(co, 0.0), -e(a[2]) * si],
                vec![e(a[1]) * si, e(a[1] + a[2]) * co],
            ]
        }
        BaseGate::Swap => {
            let mut m = vec![vec![z; 4]; 4];
            m[0][0] = o;
            m[1][2] = o;
            m[2][1] = o;
            m[3][3] = o;
            m
        }
    }
}

fn dagger(m: &Mat) -> Mat {
    let n = m.len();
    (0..n).map(|r| (0..n).map(|c| m[c][r].conj()).collect()).collect()
}

/// Full unitary of `ops` on `n` qubits, little-endian.
fn unitary(ops: &[GateOp], n: usize, params: &[f64]) -> Mat {
    let dim = 1 << n;
    let mut u: Mat = (0..dim).map(|r| (0..dim).map(|c| C::new((r == c) as u8 as f64, 0.0)).collect()).collect();
    for op in ops {
        let angles: Vec<f64> = op.angles.iter().map(|a| a.value(params)).collect();
        let mut g = base_matrix(op.base, &angles);
        if op.adjoint {
            g = dagger(&g);
        }
        let mut next = vec![vec![C::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let fires = op.controls.iter().all(|c| ((col >> c.qubit) & 1 == 1) == (c.polarity == Polarity::Pos));
            if !fires {
                next[col][col] = C::new(1.0, 0.0);
                continue;
            }
            let sub = op.targets.iter().enumerate().fold(0, |acc, (k, &t)| acc | (((col >> t) & 1) << k));
            for (row_sub, g_row) in g.iter().enumerate() {
                let mut row = col;
                for (k, &t) in op.targets.iter().enumerate() {
                    row = (row & !(1 << t)) | (((row_sub >> k) & 1) << t);
                }
                next[row][col] += g_row[sub];
            }
        }
        u = (0..dim)
            .map(|r| (0..dim).map(|c| (0..dim).map(|k| next[r][k] * u[k][c]).sum()).collect())
            .collect();
    }
    u
}

fn assert_close(a: &Mat, b: &Mat) {
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).norm() < 1e-12, "{a:?}\n!=\n{b:?}");
        }
    }
}

#[test]
fn teleport_fragment_lowers_to_gate_measure_cond() {
    let k = kernel("qubit q; bit c; h q; c = measure q; if (c == 1) x q;");
    assert_eq!(k.num_qubits, 1);
    assert_eq!(k.body.len(), 3);
    assert_eq!(k.body[0], KOp::Gate(GateOp::new(BaseGate::H, vec![], vec![0])));
    assert_eq!(k.body[1], KOp::Measure { qubit: 0, bit: BitLoc { register: 0, index: 0 } });
    let KOp::Cond(c) = &k.body[2] else { panic!("{:?}", k.body[2]) };
    assert_eq!(c.predicate.subject, PredicateSubject::Register(0));
    assert_eq!((c.predicate.comparator, c.predicate.rhs), (Comparator::Cmp(CompareOp::Eq), 1));
    assert_eq!(c.then_ops, vec![KOp::Gate(GateOp::new(BaseGate::X, vec![], vec![0]))]);
    assert!(c.else_ops.is_empty());
    assert!(k.is_dynamic() && k.has_cond());
}

#[test]
fn empty_program() {
    let k = kernel("");
    assert_eq!((k.num_qubits, k.body.len(), k.num_params(), k.num_bits()), (0, 0, 0, 0));
    assert_eq!(k.dump(), "kernel qubits=0 params=() bits=()\n");
}

#[test]
fn ctrl_modifier_prepends_positive_control() {
    let k = kernel("qubit[2] q; ctrl @ rz(0.3) q[0], q[1];");
    assert_eq!(
        gate_ops(&k),
        vec![GateOp::new(BaseGate::Rz, vec![Angle::Literal(0.3)], vec![1]).with_controls(vec![Control::pos(0)])]
    );
}

#[test]
fn named_controlled_gates_canonicalize() {
    let k = kernel("qubit[3] q; cx q[0], q[1]; ccx q[2], q[0], q[1]; crz(0.1) q[1], q[0]; ctrl @ cz q[2], q[0], q[1];");
    let g = gate_ops(&k);
    assert_eq!(g[0], GateOp::new(BaseGate::X, vec![], vec![1]).with_controls(vec![Control::pos(0)]));
    assert_eq!(g[1], GateOp::new(BaseGate::X, vec![], vec![1]).with_controls(vec![Control::pos(2), Control::pos(0)]));
    assert_eq!(g[2], GateOp::new(BaseGate::Rz, vec![Angle::Literal(0.1)], vec![0]).with_controls(vec![Control::pos(1)]));
    assert_eq!(g[3], GateOp::new(BaseGate::Z, vec![], vec![1]).with_controls(vec![Control::pos(2), Control::pos(0)]));
    let k = kernel("qubit q; sdg q; tdg q;");
    assert!(gate_ops(&k).iter().all(|g| g.adjoint));
}

#[test]
fn inv_negates_rotation_angle() {
    let k = kernel("qubit q; inv @ rz(0.5) q;");
    assert_eq!(gate_ops(&k), vec![GateOp::new(BaseGate::Rz, vec![Angle::Literal(-0.5)], vec![0])]);
    let k = kernel("qubit q; input float[64] a; inv @ rx(a) q;");
    assert_eq!(gate_ops(&k)[0].angles, vec![Angle::Param(ParamRef { slot: 0, scale: -1.0, offset: 0.0 })]);
    let k = kernel("qubit q; inv @ U(0.1, 0.2, 0.3) q;");
    assert_eq!(gate_ops(&k)[0].angles, vec![Angle::Literal(-0.1), Angle::Literal(-0.3), Angle::Literal(-0.2)]);
}

#[test]
fn pow_two_of_s_is_z() {
    let k = kernel("qubit q; pow(2) @ s q;");
    let g = gate_ops(&k);
    assert_eq!(g, vec![GateOp::new(BaseGate::S, vec![], vec![0]); 2]);
    assert_close(&unitary(&g, 1, &[]), &unitary(&[GateOp::new(BaseGate::Z, vec![], vec![0])], 1, &[]));
}

#[test]
fn double_inverse_cancels() {
    let k = kernel("qubit q; inv @ inv @ h q; inv @ inv @ s q;");
    assert!(gate_ops(&k).iter().all(|g| !g.adjoint));
}

#[test]
fn negctrl_flags_polarity() {
    let k = kernel("qubit[3] q; negctrl @ ctrl @ x q[0], q[1], q[2];");
    assert_eq!(
        gate_ops(&k),
        vec![GateOp::new(BaseGate::X, vec![], vec![2]).with_controls(vec![Control::neg(0), Control::pos(1)])]
    );
    assert!(k.dump().contains("x q2 ctrl(-q0, +q1)"));
}

#[test]
fn pow_with_non_integer_exponent_is_rejected() {
    assert!(matches!(lower_err("qubit q; pow(0.5) @ x q;"), LowerError::Modifier { .. }));
}

#[test]
fn condition_must_not_read_bits_it_writes() {
    let e = lower_err("qubit q; bit c; c = measure q; if (c == 1) { c = measure q; }");
    assert!(matches!(e, LowerError::SelfReferencingCondition { .. }));
    // Writing a different bit is fine.
    kernel("qubit q; bit[2] c; c[0] = measure q; if (c[0]) { c[1] = measure q; }");
}

#[test]
fn condition_requires_prior_measurement() {
    assert!(matches!(lower_err("qubit q; bit c; if (c) x q;"), LowerError::ReadBeforeWrite { .. }));
    // A write on one branch counts as written afterwards.
    kernel("qubit q; bit[2] c; c[0] = measure q; if (c[0]) { c[1] = measure q; } if (c[1]) x q;");
}

#[test]
fn dump_format() {
    let k = kernel(
        "qubit[2] q; bit[2] c; input array[float[64], 2] theta; rx(theta[1] / 2) q[0]; sdg q[1]; barrier q; \
         c[0] = measure q[0]; if (c[0]) { x q[1]; } else { reset q[1]; }",
    );
    assert_eq!(
        k.dump(),
        "kernel qubits=2 params=(theta[2]) bits=(c[2])\n  rx(0.5 * theta[1]) q0\n  s^dg q1\n  nop\n  \
         measure q0 -> c[0]\n  if c[0] {\n    x q1\n  } else {\n    reset q1\n  }\n"
    );
}

#[test]
fn bind_checks_arity_without_relowering() {
    let k = kernel("qubit q; input array[float[64], 2] theta; rx(theta[0]) q; ry(theta[1]) q;");
    let before = lower_count();
    let b = bind(&k, vec![0.1, 0.2]).unwrap();
    assert_eq!(b.angle(gate_ops(&k)[1].angles[0]), 0.2);
    assert_eq!(bind(&k, vec![]).unwrap_err(), BindError::ArityMismatch { expected: 2, found: 0 });
    for i in 0..50 {
        bind(&k, vec![i as f64, 0.0]).unwrap();
    }
    assert_eq!(lower_count(), before);

    let empty = kernel("qubit q;");
    assert!(bind(&empty, vec![]).is_ok());
}

#[test]
fn bind_by_name() {
    let k = kernel("qubit q; input float[64] a; input array[float[64], 2] b; rz(a) q; rz(b[1]) q;");
    let b = bind_named(&k, &[("b".into(), vec![2.0, 3.0]), ("a".into(), vec![1.0])]).unwrap();
    assert_eq!(b.params, vec![1.0, 2.0, 3.0]);
    assert_eq!(
        bind_named(&k, &[("z".into(), vec![])]).unwrap_err(),
        BindError::UnknownParameter("z".into())
    );
    assert!(matches!(
        bind_named(&k, &[("a".into(), vec![1.0]), ("b".into(), vec![1.0])]).unwrap_err(),
        BindError::ParameterLength { .. }
    ));
    assert!(matches!(
        bind_named(&k, &[("a".into(), vec![1.0]), ("a".into(), vec![1.0])]).unwrap_err(),
        BindError::DuplicateParameter(_)
    ));
}

#[test]
fn lower_counter_increments_once_per_lowering() {
    let before = lower_count();
    kernel("qubit q; h q;");
    assert_eq!(lower_count(), before + 1);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    const ONE_QUBIT: [&str; 12] = ["x", "y", "z", "h", "s", "sdg", "t", "tdg", "sx", "rx(0.7)", "ry(-1.1)", "p(0.4)"];

    fn gate_src() -> impl Strategy<Value = String> {
        prop_oneof![
            proptest::sample::select(&ONE_QUBIT[..]).prop_map(|g| format!("{g} q[0];")),
            (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b, c)| format!("U({a}, {b}, {c}) q[1];")),
            Just("cx q[0], q[1];".to_string()),
            Just("crz(0.3) q[1], q[0];".to_string()),
            Just("swap q[0], q[1];".to_string()),
            Just("cp(1.2) q[0], q[1];".to_string()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inverse_undoes_sequence(body in prop::collection::vec(gate_src(), 1..6)) {
            let fwd = body.join(" ");
            let inv: String = body.iter().rev().map(|g| format!("inv @ {g} ")).collect();
            let k = kernel(&format!("qubit[2] q; {fwd} {inv}"));
            let id = unitary(&[], 2, &[]);
            assert_close(&unitary(&gate_ops(&k), 2, &[]), &id);
        }

        #[test]
        fn modifier_algebra(g in proptest::sample::select(&ONE_QUBIT[..]), k in -3i64..=3) {
            let base = kernel(&format!("qubit[2] q; {g} q[1];"));
            let u1 = unitary(&gate_ops(&base), 2, &[]);
            // pow(k) equals k-fold product (or inverse for k<0).
            let powed = kernel(&format!("qubit[2] q; pow({k}) @ {g} q[1];"));
            let mut want = unitary(&[], 2, &[]);
            for _ in 0..k.unsigned_abs() {
                let step = if k < 0 { dagger(&u1) } else { u1.clone() };
                want = (0..4).map(|r| (0..4).map(|c| (0..4).map(|m| step[r][m] * want[m][c]).sum()).collect()).collect();
            }
            assert_close(&unitary(&gate_ops(&powed), 2, &[]), &want);
            // ctrl @ g acts as g on the |1> control block only.
            let ctrl = kernel(&format!("qubit[2] q; ctrl @ {g} q[0], q[1];"));
            let cu = unitary(&gate_ops(&ctrl), 2, &[]);
            for r in 0..4 {
                for c in 0..4 {
                    let want = if r & 1 == 1 && c & 1 == 1 {
                        u1[r][c]
                    } else if r == c && r & 1 == 0 {
                        C::new(1.0, 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    };
                    prop_assert!((cu[r][c] - want).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn binding_reuses_the_kernel(values in prop::collection::vec(-PI..PI, 3)) {
            let k = kernel("qubit[2] q; input array[float[64], 3] w; rx(w[0]) q[0]; ry(-w[1]) q[1]; cp(w[2] / 2 + 1) q[0], q[1];");
            let before = lower_count();
            let bound = bind(&k, values.clone()).unwrap();
            prop_assert_eq!(lower_count(), before);
            let ops = gate_ops(&k);
            prop_assert_eq!(bound.angle(ops[0].angles[0]), values[0]);
            prop_assert_eq!(bound.angle(ops[1].angles[0]), -values[1]);
            prop_assert!((bound.angle(ops[2].angles[0]) - (values[2] / 2.0 + 1.0)).abs() < 1e-15);
        }
    }
}
