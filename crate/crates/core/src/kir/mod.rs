//! Kernel IR: the canonical form consumed by both emitters and the simulator.

mod gates;
mod ir;
mod lower;

pub use gates::{BaseGate, StdGate};
pub use ir::*;
pub use lower::{
    bind, bind_named, canonicalize_modifiers, lower, lower_count, total_lower_count, BindError,
    BoundKernel, LowerError,
};

#[cfg(test)]
mod tests;
