//! Kernel source generation for two CUDA-Q surfaces.
//!
//! `cudaq-cpp` renders a `__qpu__` function with native `if`/`else` over
//! stored measurement results. `cudaq-builder` renders a Python script that
//! builds the kernel programmatically and attaches conditional bodies as
//! named callables via `kernel.c_if`. Both grammars are frozen in
//! `docs/emission.md`.

mod builder;
mod cpp;
mod golden;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use golden::{golden_check, GoldenError, GoldenMode};

use crate::kir::{Kernel, Predicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EmissionTarget {
    CudaqCpp,
    CudaqBuilder,
}

impl EmissionTarget {
    pub const ALL: [EmissionTarget; 2] = [EmissionTarget::CudaqCpp, EmissionTarget::CudaqBuilder];

    pub fn id(self) -> &'static str {
        match self {
            EmissionTarget::CudaqCpp => "cudaq-cpp",
            EmissionTarget::CudaqBuilder => "cudaq-builder",
        }
    }
}

impl fmt::Display for EmissionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for EmissionTarget {
    type Err = EmitError;

    fn from_str(s: &str) -> Result<Self, EmitError> {
        Self::ALL.into_iter().find(|t| t.id() == s).ok_or_else(|| EmitError::UnknownTarget(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("unknown emission target `{0}` (expected cudaq-cpp or cudaq-builder)")]
    UnknownTarget(String),
    #[error("internal error: no rendering for {0}")]
    UnsupportedOp(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmittedSource {
    pub target: EmissionTarget,
    pub text: String,
    /// Kernel arguments in order: (name, element count).
    pub param_signature: Vec<(String, usize)>,
}

pub fn emit(kernel: &Kernel, target: EmissionTarget) -> Result<EmittedSource, EmitError> {
    let text = match target {
        EmissionTarget::CudaqCpp => cpp::render(kernel)?,
        EmissionTarget::CudaqBuilder => builder::render(kernel)?,
    };
    Ok(EmittedSource {
        target,
        text,
        param_signature: kernel.param_layout.iter().map(|p| (p.name.clone(), p.len)).collect(),
    })
}

/// Name of the local holding flat bit `k`.
fn bit_local(k: usize) -> String {
    format!("m{k}")
}

/// MSB-first pack of a register's bit locals: `(m0 << 2) | (m1 << 1) | m2`.
fn pack_expr(kernel: &Kernel, register: usize) -> String {
    let base = kernel.bit_offsets()[register];
    let width = kernel.classical_layout[register].width;
    (0..width)
        .map(|i| {
            let shift = width - 1 - i;
            if shift == 0 {
                bit_local(base + i)
            } else {
                format!("({} << {shift})", bit_local(base + i))
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Predicate over `subject`, which is a bit local or pack local.
fn predicate_expr(p: &Predicate, subject: &str) -> String {
    use crate::kir::Comparator;
    match p.comparator {
        Comparator::Truthy => subject.to_string(),
        Comparator::Cmp(op) => format!("{subject} {} {}", op.symbol(), p.rhs),
    }
}
