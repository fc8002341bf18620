use std::fmt::Write;

use super::{bit_local, pack_expr, predicate_expr, EmitError};
use crate::kir::{BaseGate, GateOp, KOp, Kernel, Polarity, PredicateSubject};

const SX_HELPER: &str = "struct sx_op {\n  void operator()(cudaq::qubit &qb) __qpu__ {\n    h(qb);\n    s(qb);\n    h(qb);\n  }\n};\n\n";

pub(super) fn render(kernel: &Kernel) -> Result<String, EmitError> {
    let mut r = Renderer { kernel, out: String::new(), packs: 0 };
    let mut uses_sx = false;
    kernel.for_each_gate(|g| uses_sx |= g.base == BaseGate::Sx);

    r.out.push_str("#include <cudaq.h>\n\n");
    if uses_sx {
        r.out.push_str(SX_HELPER);
    }
    let args: Vec<String> = kernel
        .param_layout
        .iter()
        .map(|p| if p.is_array { format!("std::vector<double> {}", p.name) } else { format!("double {}", p.name) })
        .collect();
    let _ = writeln!(r.out, "__qpu__ void qasm_kernel({}) {{", args.join(", "));
    if kernel.num_qubits > 0 {
        let _ = writeln!(r.out, "  cudaq::qvector q({});", kernel.num_qubits);
    }
    for k in 0..kernel.num_bits() {
        let _ = writeln!(r.out, "  bool {} = false;", bit_local(k));
    }
    r.ops(&kernel.body, 1)?;
    r.out.push_str("}\n");
    Ok(r.out)
}

struct Renderer<'k> {
    kernel: &'k Kernel,
    out: String,
    packs: usize,
}

fn qref(q: usize) -> String {
    format!("q[{q}]")
}

fn gate_name(base: BaseGate) -> &'static str {
    match base {
        BaseGate::P => "r1",
        BaseGate::U => "u3",
        other => other.name(),
    }
}

impl Renderer<'_> {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn ops(&mut self, ops: &[KOp], depth: usize) -> Result<(), EmitError> {
        for op in ops {
            match op {
                KOp::Gate(g) => self.gate(g, depth),
                KOp::Measure { qubit, bit } => {
                    let k = self.kernel.flat_bit(*bit);
                    self.line(depth, &format!("{} = mz({});", bit_local(k), qref(*qubit)));
                }
                KOp::Reset { qubit } => self.line(depth, &format!("reset({});", qref(*qubit))),
                KOp::Nop => self.line(depth, "// barrier"),
                KOp::Cond(c) => {
                    let subject = match c.predicate.subject {
                        PredicateSubject::Bit(b) => bit_local(self.kernel.flat_bit(b)),
                        PredicateSubject::Register(reg) if self.kernel.classical_layout[reg].width == 1 => {
                            bit_local(self.kernel.bit_offsets()[reg])
                        }
                        PredicateSubject::Register(reg) => {
                            let name = format!("pk{}", self.packs);
                            self.packs += 1;
                            let pack = pack_expr(self.kernel, reg);
                            self.line(depth, &format!("int {name} = {pack};"));
                            name
                        }
                    };
                    self.line(depth, &format!("if ({}) {{", predicate_expr(&c.predicate, &subject)));
                    self.ops(&c.then_ops, depth + 1)?;
                    if !c.else_ops.is_empty() {
                        self.line(depth, "} else {");
                        self.ops(&c.else_ops, depth + 1)?;
                    }
                    self.line(depth, "}");
                }
            }
        }
        Ok(())
    }

    fn gate(&mut self, g: &GateOp, depth: usize) {
        let angles: Vec<String> = g.angles.iter().map(|a| self.kernel.angle_text(*a)).collect();
        let targets: Vec<String> = g.targets.iter().map(|&q| qref(q)).collect();

        if g.base == BaseGate::Sx {
            self.helper_call("sx_op{}", g, &targets, depth);
            return;
        }
        if g.adjoint && !g.controls.is_empty() {
            let inner = format!("{}<cudaq::adj>(qb);", gate_name(g.base));
            self.helper_call(&format!("[](cudaq::qubit &qb) __qpu__ {{ {inner} }}"), g, &targets, depth);
            return;
        }

        let mut args = angles;
        let modifier = if g.adjoint {
            "<cudaq::adj>"
        } else if !g.controls.is_empty() {
            args.extend(g.controls.iter().map(|c| match c.polarity {
                Polarity::Pos => qref(c.qubit),
                Polarity::Neg => format!("!{}", qref(c.qubit)),
            }));
            "<cudaq::ctrl>"
        } else {
            ""
        };
        args.extend(targets);
        self.line(depth, &format!("{}{modifier}({});", gate_name(g.base), args.join(", ")));
    }

    /// Applies a callable through `cudaq::control` / `cudaq::adjoint`.
    /// Negated controls are rendered as an x-sandwich.
    fn helper_call(&mut self, callable: &str, g: &GateOp, targets: &[String], depth: usize) {
        let negs: Vec<usize> = g.controls.iter().filter(|c| c.polarity == Polarity::Neg).map(|c| c.qubit).collect();
        for &q in &negs {
            self.line(depth, &format!("x({});  // negctrl flip", qref(q)));
        }
        let call = if g.controls.is_empty() {
            if g.adjoint {
                format!("cudaq::adjoint({callable}, {});", targets.join(", "))
            } else {
                format!("{callable}({});", targets.join(", "))
            }
        } else {
            let ctrls: Vec<String> = g.controls.iter().map(|c| qref(c.qubit)).collect();
            let callable = if g.base == BaseGate::Sx && g.adjoint {
                "[](cudaq::qubit &qb) __qpu__ { cudaq::adjoint(sx_op{}, qb); }".to_string()
            } else {
                callable.to_string()
            };
            format!("cudaq::control({callable}, {{{}}}, {});", ctrls.join(", "), targets.join(", "))
        };
        self.line(depth, &call);
        for &q in &negs {
            self.line(depth, &format!("x({});  // negctrl flip", qref(q)));
        }
    }
}
