#![allow(dead_code)]

use std::path::PathBuf;

use qasm2cudaq::emit::EmissionTarget;

/// Golden corpus program names; each is emitted for both targets.
pub const GOLDEN_CASES: [&str; 6] =
    ["bell", "feedforward_if_else", "gates_loops_reset", "hea_params", "modifiers", "teleport"];

pub fn golden_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub fn program(case: &str) -> String {
    let path = golden_root().join("programs").join(format!("{case}.qasm"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn golden_path(target: EmissionTarget, case: &str) -> PathBuf {
    golden_root().join(target.id()).join(format!("{case}.txt"))
}

/// Lines of the then-body and else-body of `feedforward_if_else`, per target.
pub fn branch_body_lines(target: EmissionTarget) -> ([&'static str; 2], [&'static str; 2]) {
    match target {
        EmissionTarget::CudaqCpp => (["x(q[1]);", "rz(0.7853981633974483, q[1]);"], ["h(q[1]);", "s(q[1]);"]),
        EmissionTarget::CudaqBuilder => {
            (["kernel.x(q[1])", "kernel.rz(0.7853981633974483, q[1])"], ["kernel.h(q[1])", "kernel.s(q[1])"])
        }
    }
}

pub fn count_lines(text: &str, line: &str) -> usize {
    text.lines().filter(|l| l.trim() == line).count()
}

/// Binomial 6σ half-width for `n` trials at probability `p`.
pub fn six_sigma(n: u64, p: f64) -> f64 {
    6.0 * (n as f64 * p * (1.0 - p)).sqrt()
}

pub const PLUS_MEASURE: &str = "OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit q;\nbit c;\nh q;\nc = measure q;\n";
