use std::fmt::{self, Write};

use serde::Serialize;

use super::gates::BaseGate;
use crate::frontend::ast::CompareOp;

/// A reference to a runtime parameter, in the affine form `scale * p[slot] + offset`.
///
/// Plain references have `scale == 1.0, offset == 0.0`; the affine part
/// exists so `inv @ rx(theta[0])` and `rx(theta[0] / 2)` stay symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRef {
    pub slot: usize,
    pub scale: f64,
    pub offset: f64,
}

impl ParamRef {
    pub fn new(slot: usize) -> Self {
        Self { slot, scale: 1.0, offset: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Literal(f64),
    Param(ParamRef),
}

impl Angle {
    pub fn negated(self) -> Angle {
        match self {
            Angle::Literal(v) => Angle::Literal(-v),
            Angle::Param(p) => Angle::Param(ParamRef { slot: p.slot, scale: -p.scale, offset: -p.offset }),
        }
    }

    /// Resolves against a flat parameter vector. Panics if the slot is out of
    /// range; binding guarantees it is not.
    pub fn value(self, params: &[f64]) -> f64 {
        match self {
            Angle::Literal(v) => v,
            Angle::Param(p) => p.scale * params[p.slot] + p.offset,
        }
    }

    pub fn param_slot(self) -> Option<usize> {
        match self {
            Angle::Param(p) => Some(p.slot),
            Angle::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Pos,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Self { qubit, polarity: Polarity::Pos }
    }

    pub fn neg(qubit: usize) -> Self {
        Self { qubit, polarity: Polarity::Neg }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub base: BaseGate,
    pub angles: Vec<Angle>,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
    pub adjoint: bool,
}

impl GateOp {
    pub fn new(base: BaseGate, angles: Vec<Angle>, targets: Vec<usize>) -> Self {
        Self { base, angles, targets, controls: Vec::new(), adjoint: false }
    }

    pub fn with_controls(mut self, controls: Vec<Control>) -> Self {
        self.controls = controls;
        self
    }

    /// The inverse operation. Rotations negate their angles (`u(θ,φ,λ)†` is
    /// `u(-θ,-λ,-φ)`), self-inverse gates are unchanged, and `s`/`t`/`sx`
    /// toggle the adjoint flag.
    pub fn adjoint(&self) -> GateOp {
        let mut out = self.clone();
        match self.base {
            BaseGate::U => {
                let [theta, phi, lambda] = [self.angles[0], self.angles[1], self.angles[2]];
                out.angles = vec![theta.negated(), lambda.negated(), phi.negated()];
            }
            b if b.is_rotation() => {
                out.angles = self.angles.iter().map(|a| a.negated()).collect();
            }
            b if b.is_self_inverse() => {}
            _ => out.adjoint = !self.adjoint,
        }
        out
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().map(|c| c.qubit).chain(self.targets.iter().copied())
    }
}

/// One classical bit: register index into the classical layout plus bit index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BitLoc {
    pub register: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredicateSubject {
    Bit(BitLoc),
    /// Whole register, read as an unsigned integer with bit 0 most significant.
    Register(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Cmp(CompareOp),
    /// Non-zero test (`if (c)`).
    Truthy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Predicate {
    pub subject: PredicateSubject,
    pub comparator: Comparator,
    pub rhs: u64,
}

impl Predicate {
    pub fn evaluate(&self, value: u64) -> bool {
        match self.comparator {
            Comparator::Truthy => value != 0,
            Comparator::Cmp(op) => op.holds(value, self.rhs),
        }
    }

    /// A predicate true exactly when this one is false.
    pub fn negated(&self) -> Predicate {
        let comparator = match self.comparator {
            Comparator::Truthy => return Predicate { comparator: Comparator::Cmp(CompareOp::Eq), rhs: 0, ..*self },
            Comparator::Cmp(op) => Comparator::Cmp(op.negated()),
        };
        Predicate { comparator, ..*self }
    }

    pub fn reads(&self, bit: BitLoc) -> bool {
        match self.subject {
            PredicateSubject::Bit(b) => b == bit,
            PredicateSubject::Register(r) => r == bit.register,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondBlock {
    pub predicate: Predicate,
    pub then_ops: Vec<KOp>,
    pub else_ops: Vec<KOp>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KOp {
    Gate(GateOp),
    Measure { qubit: usize, bit: BitLoc },
    Reset { qubit: usize },
    Cond(CondBlock),
    /// Lowered `barrier`; no semantic effect.
    Nop,
}

impl KOp {
    /// Number of ops in this subtree, counting a `Cond` as its children only.
    pub fn op_count(&self) -> usize {
        match self {
            KOp::Cond(c) => c.then_ops.iter().chain(&c.else_ops).map(KOp::op_count).sum(),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ParamDecl {
    pub name: String,
    pub len: usize,
    /// `true` for `input array[...]`, `false` for a scalar `input float[W]`.
    pub is_array: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RegisterDecl {
    pub name: String,
    pub width: usize,
}

/// The compiled unit shared by the emitters and the simulator. Immutable once
/// lowered.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub num_qubits: usize,
    pub param_layout: Vec<ParamDecl>,
    pub classical_layout: Vec<RegisterDecl>,
    pub body: Vec<KOp>,
}

impl Kernel {
    pub fn num_params(&self) -> usize {
        self.param_layout.iter().map(|p| p.len).sum()
    }

    pub fn num_bits(&self) -> usize {
        self.classical_layout.iter().map(|r| r.width).sum()
    }

    /// Offset of each register's first bit in the flat bit numbering.
    pub fn bit_offsets(&self) -> Vec<usize> {
        self.classical_layout
            .iter()
            .scan(0, |acc, r| {
                let off = *acc;
                *acc += r.width;
                Some(off)
            })
            .collect()
    }

    pub fn flat_bit(&self, bit: BitLoc) -> usize {
        self.bit_offsets()[bit.register] + bit.index
    }

    /// Name and element index a flat parameter slot refers to.
    pub fn param_name(&self, slot: usize) -> (&ParamDecl, usize) {
        let mut base = 0;
        for p in &self.param_layout {
            if slot < base + p.len {
                return (p, slot - base);
            }
            base += p.len;
        }
        panic!("parameter slot {slot} out of range");
    }

    pub fn is_dynamic(&self) -> bool {
        fn dynamic(ops: &[KOp]) -> bool {
            ops.iter().any(|op| matches!(op, KOp::Measure { .. } | KOp::Reset { .. } | KOp::Cond(_)))
        }
        dynamic(&self.body)
    }

    pub fn has_cond(&self) -> bool {
        self.body.iter().any(|op| matches!(op, KOp::Cond(_)))
    }

    /// Visit every gate op, descending into both branches of conditionals.
    pub fn for_each_gate(&self, mut f: impl FnMut(&GateOp)) {
        fn walk(ops: &[KOp], f: &mut impl FnMut(&GateOp)) {
            for op in ops {
                match op {
                    KOp::Gate(g) => f(g),
                    KOp::Cond(c) => {
                        walk(&c.then_ops, f);
                        walk(&c.else_ops, f);
                    }
                    _ => {}
                }
            }
        }
        walk(&self.body, &mut f);
    }

    /// Stable text dump, one op per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self.param_layout.iter().map(|p| format!("{}[{}]", p.name, p.len)).collect();
        let bits: Vec<String> = self.classical_layout.iter().map(|r| format!("{}[{}]", r.name, r.width)).collect();
        let _ = writeln!(
            out,
            "kernel qubits={} params=({}) bits=({})",
            self.num_qubits,
            params.join(", "),
            bits.join(", ")
        );
        self.dump_ops(&mut out, &self.body, 1);
        out
    }

    fn bit_name(&self, bit: BitLoc) -> String {
        format!("{}[{}]", self.classical_layout[bit.register].name, bit.index)
    }

    pub fn angle_text(&self, a: Angle) -> String {
        match a {
            Angle::Literal(v) => format!("{v:?}"),
            Angle::Param(p) => {
                let (decl, idx) = self.param_name(p.slot);
                let name = if decl.is_array { format!("{}[{idx}]", decl.name) } else { decl.name.clone() };
                affine_text(&name, p.scale, p.offset)
            }
        }
    }

    pub fn predicate_text(&self, p: &Predicate) -> String {
        let subject = match p.subject {
            PredicateSubject::Bit(b) => self.bit_name(b),
            PredicateSubject::Register(r) => self.classical_layout[r].name.clone(),
        };
        match p.comparator {
            Comparator::Truthy => subject,
            Comparator::Cmp(op) => format!("{subject} {} {}", op.symbol(), p.rhs),
        }
    }

    fn dump_ops(&self, out: &mut String, ops: &[KOp], depth: usize) {
        let pad = "  ".repeat(depth);
        for op in ops {
            match op {
                KOp::Gate(g) => {
                    let _ = write!(out, "{pad}{}", g.base);
                    if g.adjoint {
                        out.push_str("^dg");
                    }
                    if !g.angles.is_empty() {
                        let a: Vec<_> = g.angles.iter().map(|a| self.angle_text(*a)).collect();
                        let _ = write!(out, "({})", a.join(", "));
                    }
                    let t: Vec<_> = g.targets.iter().map(|q| format!("q{q}")).collect();
                    let _ = write!(out, " {}", t.join(", "));
                    if !g.controls.is_empty() {
                        let c: Vec<_> = g
                            .controls
                            .iter()
                            .map(|c| match c.polarity {
                                Polarity::Pos => format!("+q{}", c.qubit),
                                Polarity::Neg => format!("-q{}", c.qubit),
                            })
                            .collect();
                        let _ = write!(out, " ctrl({})", c.join(", "));
                    }
                    out.push('\n');
                }
                KOp::Measure { qubit, bit } => {
                    let _ = writeln!(out, "{pad}measure q{qubit} -> {}", self.bit_name(*bit));
                }
                KOp::Reset { qubit } => {
                    let _ = writeln!(out, "{pad}reset q{qubit}");
                }
                KOp::Nop => {
                    let _ = writeln!(out, "{pad}nop");
                }
                KOp::Cond(c) => {
                    let _ = writeln!(out, "{pad}if {} {{", self.predicate_text(&c.predicate));
                    self.dump_ops(out, &c.then_ops, depth + 1);
                    if !c.else_ops.is_empty() {
                        let _ = writeln!(out, "{pad}}} else {{");
                        self.dump_ops(out, &c.else_ops, depth + 1);
                    }
                    let _ = writeln!(out, "{pad}}}");
                }
            }
        }
    }
}

/// Renders `scale * name + offset` with the unit cases simplified.
pub fn affine_text(name: &str, scale: f64, offset: f64) -> String {
    let mut s = if scale == 1.0 {
        name.to_string()
    } else if scale == -1.0 {
        format!("-{name}")
    } else {
        format!("{scale:?} * {name}")
    };
    if offset > 0.0 {
        let _ = write!(s, " + {offset:?}");
    } else if offset < 0.0 {
        let _ = write!(s, " - {:?}", -offset);
    }
    s
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
