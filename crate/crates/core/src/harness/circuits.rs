use std::f64::consts::PI;

use crate::sim::RngStream;

pub const HEADER: &str = "OPENQASM 3.0;\ninclude \"stdgates.inc\";\n";

/// A random gate-level circuit, kept as OpenQASM statements so every use
/// goes through the full pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCircuitSpec {
    pub qubits: usize,
    pub gates: usize,
    /// Adds `t`, `rx`, `ry`, `rz` to the Clifford set {h, s, cx}.
    pub rotations: bool,
    pub seed: u64,
}

impl RandomCircuitSpec {
    /// Gate statements, one per gate.
    pub fn statements(&self) -> Vec<String> {
        assert!(self.qubits >= 2, "random circuits need at least two qubits");
        let mut rng = RngStream::new(self.seed);
        let kinds: &[&str] = if self.rotations { &["h", "s", "cx", "t", "rx", "ry", "rz"] } else { &["h", "s", "cx"] };
        let pick = |rng: &mut RngStream, n: usize| (rng.next_u64() % n as u64) as usize;
        (0..self.gates)
            .map(|_| {
                let kind = kinds[pick(&mut rng, kinds.len())];
                let a = pick(&mut rng, self.qubits);
                match kind {
                    "cx" => {
                        let b = (a + 1 + pick(&mut rng, self.qubits - 1)) % self.qubits;
                        format!("cx q[{a}], q[{b}];")
                    }
                    "rx" | "ry" | "rz" => format!("{kind}({:?}) q[{a}];", (2.0 * rng.uniform() - 1.0) * PI),
                    g => format!("{g} q[{a}];"),
                }
            })
            .collect()
    }

    pub fn render(&self) -> String {
        format!("{HEADER}qubit[{}] q;\n{}\n", self.qubits, self.statements().join("\n"))
    }

    /// The circuit followed by its inverse, gate by gate in reverse with `inv @`.
    pub fn render_with_uncompute(&self) -> String {
        let fwd = self.statements();
        let inv: Vec<String> = fwd.iter().rev().map(|g| format!("inv @ {g}")).collect();
        format!("{HEADER}qubit[{}] q;\n{}\n{}\n", self.qubits, fwd.join("\n"), inv.join("\n"))
    }
}

/// Measure, then flip on outcome 1, then measure again into `r`.
pub fn conditional_reset_source(prep: &str) -> String {
    format!("{HEADER}qubit q;\nbit c;\nbit r;\n{prep}\nc = measure q;\nif (c == 1) x q;\nr = measure q;\n")
}

/// Teleports `U(θ,φ,λ)|0⟩` from q[0] to q[2], undoes `U` on q[2] and measures it into `r`.
pub fn teleport_source(theta: f64, phi: f64, lambda: f64) -> String {
    format!(
        "{HEADER}qubit[3] q;\nbit[2] c;\nbit r;\n\
         U({theta:?}, {phi:?}, {lambda:?}) q[0];\n\
         h q[1];\ncx q[1], q[2];\n\
         cx q[0], q[1];\nh q[0];\n\
         c[0] = measure q[0];\nc[1] = measure q[1];\n\
         if (c[1] == 1) x q[2];\nif (c[0] == 1) z q[2];\n\
         inv @ U({theta:?}, {phi:?}, {lambda:?}) q[2];\n\
         r = measure q[2];\n"
    )
}

/// Hardware-efficient ansatz: per layer an `ry` on every qubit then a `cx` chain.
pub fn hea_source(qubits: usize, layers: usize) -> String {
    let mut s = format!("{HEADER}input array[float[64], {}] theta;\nqubit[{qubits}] q;\n", qubits * layers);
    s += &format!("for int l in [0:{}] {{\n", layers - 1);
    s += &format!("  for int i in [0:{}] {{\n    ry(theta[{qubits} * l + i]) q[i];\n  }}\n", qubits - 1);
    if qubits > 1 {
        s += &format!("  for int i in [0:{}] {{\n    cx q[i], q[i + 1];\n  }}\n", qubits - 2);
    }
    s += "}\n";
    s
}

/// Bernstein–Vazirani for `hidden` (character `i` is the bit queried by q[i]).
pub fn bernstein_vazirani_source(hidden: &str) -> String {
    let n = hidden.len();
    let mut s = format!("{HEADER}qubit[{n}] q;\nqubit a;\nbit[{n}] c;\nx a;\nh a;\nh q;\n");
    for (i, ch) in hidden.chars().enumerate() {
        if ch == '1' {
            s += &format!("cx q[{i}], a;\n");
        }
    }
    s += "h q;\nc = measure q;\n";
    s
}

/// QFT on `n` qubits applied to basis state `input` (q[0] least significant).
pub fn qft_source(n: usize, input: usize) -> String {
    let mut s = format!("{HEADER}qubit[{n}] q;\n");
    for k in 0..n {
        if (input >> k) & 1 == 1 {
            s += &format!("x q[{k}];\n");
        }
    }
    for j in (0..n).rev() {
        s += &format!("h q[{j}];\n");
        for k in (0..j).rev() {
            s += &format!("cp(pi / {}) q[{k}], q[{j}];\n", 1u64 << (j - k));
        }
    }
    for i in 0..n / 2 {
        s += &format!("swap q[{i}], q[{}];\n", n - 1 - i);
    }
    s
}
