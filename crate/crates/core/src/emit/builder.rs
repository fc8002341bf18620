use super::{bit_local, pack_expr, predicate_expr, EmitError};
use crate::kir::{BaseGate, Comparator, GateOp, KOp, Kernel, Polarity, Predicate, PredicateSubject};

const HEADER: &str = "import json\nimport sys\n\n\ndef build_kernel():\n    import cudaq\n\n";

const FOOTER: &str = "    return kernel\n\n\nif __name__ == \"__main__\":\n    import cudaq\n\n    \
args = json.loads(sys.argv[1]) if len(sys.argv) > 1 else []\n    print(cudaq.sample(build_kernel(), *args))\n";

pub(super) fn render(kernel: &Kernel) -> Result<String, EmitError> {
    let mut r = Renderer { kernel, out: String::from(HEADER), conds: 0, subs: 0, packs: 0 };

    let names: Vec<&str> = kernel.param_layout.iter().map(|p| p.name.as_str()).collect();
    let types: Vec<&str> = kernel.param_layout.iter().map(|p| if p.is_array { "list[float]" } else { "float" }).collect();
    if names.is_empty() {
        r.line(1, "kernel = cudaq.make_kernel()");
    } else {
        r.line(1, &format!("kernel, {} = cudaq.make_kernel({})", names.join(", "), types.join(", ")));
    }
    if kernel.num_qubits > 0 {
        r.line(1, &format!("q = kernel.qalloc({})", kernel.num_qubits));
    }
    for k in 0..kernel.num_bits() {
        r.line(1, &format!("{} = None", bit_local(k)));
    }
    let mut uses_sx = false;
    kernel.for_each_gate(|g| uses_sx |= g.base == BaseGate::Sx);
    if uses_sx {
        r.line(1, "sx_op, sx_q = cudaq.make_kernel(cudaq.qubit)");
        r.line(1, "sx_op.h(sx_q)");
        r.line(1, "sx_op.s(sx_q)");
        r.line(1, "sx_op.h(sx_q)");
    }
    r.ops(&kernel.body, 1)?;
    r.out.push_str(FOOTER);
    Ok(r.out)
}

struct Renderer<'k> {
    kernel: &'k Kernel,
    out: String,
    conds: usize,
    subs: usize,
    packs: usize,
}

fn qref(q: usize) -> String {
    format!("q[{q}]")
}

fn base_name(base: BaseGate) -> &'static str {
    match base {
        BaseGate::P => "r1",
        BaseGate::U => "u3",
        other => other.name(),
    }
}

/// Bits written directly by `ops`, not counting nested conditionals.
fn direct_writes(kernel: &Kernel, ops: &[KOp]) -> Vec<usize> {
    let mut out: Vec<usize> = ops
        .iter()
        .filter_map(|op| match op {
            KOp::Measure { bit, .. } => Some(kernel.flat_bit(*bit)),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl Renderer<'_> {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn ops(&mut self, ops: &[KOp], depth: usize) -> Result<(), EmitError> {
        for op in ops {
            match op {
                KOp::Gate(g) => self.gate(g, depth),
                KOp::Measure { qubit, bit } => {
                    let m = bit_local(self.kernel.flat_bit(*bit));
                    self.line(depth, &format!("{m} = kernel.mz({}, \"{m}\")", qref(*qubit)));
                }
                KOp::Reset { qubit } => self.line(depth, &format!("kernel.reset({})", qref(*qubit))),
                KOp::Nop => self.line(depth, "# barrier"),
                KOp::Cond(c) => {
                    let k = self.conds;
                    self.conds += 1;
                    self.out.push('\n');
                    self.callable(&format!("then_{k}"), &c.then_ops, depth)?;
                    if !c.else_ops.is_empty() {
                        self.callable(&format!("else_{k}"), &c.else_ops, depth)?;
                    }
                    let subject = self.subject(&c.predicate, depth);
                    self.line(depth, &format!("kernel.c_if({}, then_{k})", self.condition(&c.predicate, &subject)));
                    if !c.else_ops.is_empty() {
                        let neg = c.predicate.negated();
                        self.line(depth, &format!("kernel.c_if({}, else_{k})", self.condition(&neg, &subject)));
                    }
                }
            }
        }
        Ok(())
    }

    fn callable(&mut self, name: &str, body: &[KOp], depth: usize) -> Result<(), EmitError> {
        self.line(depth, &format!("def {name}():"));
        let writes = direct_writes(self.kernel, body);
        if !writes.is_empty() {
            let names: Vec<String> = writes.into_iter().map(bit_local).collect();
            self.line(depth + 1, &format!("nonlocal {}", names.join(", ")));
        }
        if body.iter().all(|op| matches!(op, KOp::Nop)) {
            self.line(depth + 1, "pass");
        }
        self.ops(body, depth + 1)?;
        self.out.push('\n');
        Ok(())
    }

    fn subject(&mut self, p: &Predicate, depth: usize) -> String {
        match p.subject {
            PredicateSubject::Bit(b) => bit_local(self.kernel.flat_bit(b)),
            PredicateSubject::Register(reg) if self.kernel.classical_layout[reg].width == 1 => {
                bit_local(self.kernel.bit_offsets()[reg])
            }
            PredicateSubject::Register(reg) => {
                let name = format!("pk{}", self.packs);
                self.packs += 1;
                let pack = pack_expr(self.kernel, reg);
                self.line(depth, &format!("{name} = {pack}"));
                name
            }
        }
    }

    /// A single stored bit tested for 1 is passed to `c_if` as the bare
    /// measurement handle; anything else is a comparison expression.
    fn condition(&self, p: &Predicate, subject: &str) -> String {
        use crate::frontend::ast::CompareOp;
        let single_bit = match p.subject {
            PredicateSubject::Bit(_) => true,
            PredicateSubject::Register(r) => self.kernel.classical_layout[r].width == 1,
        };
        let tests_one = matches!(
            (p.comparator, p.rhs),
            (Comparator::Truthy, _) | (Comparator::Cmp(CompareOp::Eq), 1) | (Comparator::Cmp(CompareOp::Ne), 0)
        );
        if single_bit && tests_one {
            subject.to_string()
        } else {
            predicate_expr(p, subject)
        }
    }

    fn gate(&mut self, g: &GateOp, depth: usize) {
        let negs: Vec<usize> = g.controls.iter().filter(|c| c.polarity == Polarity::Neg).map(|c| c.qubit).collect();
        for &q in &negs {
            self.line(depth, &format!("kernel.x({})  # negctrl flip", qref(q)));
        }
        self.gate_inner(g, depth);
        for &q in &negs {
            self.line(depth, &format!("kernel.x({})  # negctrl flip", qref(q)));
        }
    }

    fn gate_inner(&mut self, g: &GateOp, depth: usize) {
        let angles: Vec<String> = g.angles.iter().map(|a| self.kernel.angle_text(*a)).collect();
        let targets: Vec<String> = g.targets.iter().map(|&q| qref(q)).collect();
        let controls = match g.controls.len() {
            0 => None,
            1 => Some(qref(g.controls[0].qubit)),
            _ => Some(format!("[{}]", g.controls.iter().map(|c| qref(c.qubit)).collect::<Vec<_>>().join(", "))),
        };

        let call = |name: &str, lead: Option<&String>| {
            let mut args = angles.clone();
            args.extend(lead.cloned());
            args.extend(targets.iter().cloned());
            format!("kernel.{name}({})", args.join(", "))
        };

        match (&controls, g.base, g.adjoint) {
            (None, BaseGate::Sx, false) => self.line(depth, &format!("kernel.apply_call(sx_op, {})", targets[0])),
            (None, BaseGate::Sx, true) => self.line(depth, &format!("kernel.adjoint(sx_op, {})", targets[0])),
            (None, base, true) => self.line(depth, &call(&format!("{}dg", base.name()), None)),
            (None, base, false) => self.line(depth, &call(base_name(base), None)),
            (Some(c), BaseGate::Sx, false) => self.line(depth, &format!("kernel.control(sx_op, {c}, {})", targets[0])),
            (Some(c), base, false) if base != BaseGate::U => {
                self.line(depth, &call(&format!("c{}", base_name(base)), Some(c)))
            }
            (Some(c), _, _) => self.controlled_sub(g, c, &angles, &targets, depth),
        }
    }

    /// Wraps the gate in a one-qubit sub-kernel, angles passed as arguments,
    /// and applies it with `kernel.control`.
    fn controlled_sub(&mut self, g: &GateOp, controls: &str, angles: &[String], targets: &[String], depth: usize) {
        let k = self.subs;
        self.subs += 1;
        let sub = format!("sub{k}");
        let formals: Vec<String> = (0..angles.len()).map(|i| format!("{sub}_a{i}")).collect();
        let mut lhs = vec![sub.clone()];
        lhs.extend(formals.iter().cloned());
        lhs.push(format!("{sub}_q"));
        let mut types = vec!["float"; angles.len()];
        types.push("cudaq.qubit");
        self.line(depth, &format!("{} = cudaq.make_kernel({})", lhs.join(", "), types.join(", ")));
        let mut inner_args = formals.clone();
        inner_args.push(format!("{sub}_q"));
        let body = match (g.base, g.adjoint) {
            (BaseGate::Sx, true) => format!("{sub}.adjoint(sx_op, {sub}_q)"),
            (base, true) => format!("{sub}.{}dg({})", base.name(), inner_args.join(", ")),
            (base, false) => format!("{sub}.{}({})", base_name(base), inner_args.join(", ")),
        };
        self.line(depth, &body);
        let mut args = vec![sub, controls.to_string()];
        args.extend(angles.iter().cloned());
        args.extend(targets.iter().cloned());
        self.line(depth, &format!("kernel.control({})", args.join(", ")));
    }
}
