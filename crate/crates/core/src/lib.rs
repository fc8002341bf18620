//! OpenQASM 3.0 to CUDA-Q kernel transpiler with an embedded trajectory
//! state-vector simulator.
//!
//! The pipeline is `frontend` (tokens, AST) → `sema` (symbols, unrolling,
//! inlining) → `kir` (canonical kernel IR) → `emit` (kernel source text) or
//! `sim` (execution). `harness` holds the validation suites and oracles.

pub mod emit;
pub mod frontend;
pub mod harness;
pub mod kir;
pub mod sema;
pub mod sim;

use thiserror::Error;

pub use kir::{bind, lower, BoundKernel, Kernel};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Frontend(#[from] frontend::FrontendError),
    #[error("semantic error at {0}")]
    Sema(#[from] sema::SemaError),
    #[error("lowering error at {0}")]
    Lower(#[from] kir::LowerError),
    #[error(transparent)]
    Bind(#[from] kir::BindError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
    #[error(transparent)]
    Emit(#[from] emit::EmitError),
}

/// Source text to kernel: parse, analyze and lower.
pub fn compile(source: &str) -> Result<Kernel, Error> {
    let ast = frontend::parse_source(source)?;
    let vp = sema::analyze(&ast)?;
    Ok(kir::lower(&vp)?)
}
