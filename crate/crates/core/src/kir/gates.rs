//! Gate name tables: the source-level standard library and the canonical IR set.

use std::fmt;

/// Gates every kernel op is expressed in. Named controlled gates and daggered
/// variants never reach the IR; they become a base gate plus controls/adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseGate {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Sx,
    Rx,
    Ry,
    Rz,
    P,
    U,
    Swap,
}

impl BaseGate {
    pub const ALL: [BaseGate; 13] = [
        BaseGate::X,
        BaseGate::Y,
        BaseGate::Z,
        BaseGate::H,
        BaseGate::S,
        BaseGate::T,
        BaseGate::Sx,
        BaseGate::Rx,
        BaseGate::Ry,
        BaseGate::Rz,
        BaseGate::P,
        BaseGate::U,
        BaseGate::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseGate::X => "x",
            BaseGate::Y => "y",
            BaseGate::Z => "z",
            BaseGate::H => "h",
            BaseGate::S => "s",
            BaseGate::T => "t",
            BaseGate::Sx => "sx",
            BaseGate::Rx => "rx",
            BaseGate::Ry => "ry",
            BaseGate::Rz => "rz",
            BaseGate::P => "p",
            BaseGate::U => "u",
            BaseGate::Swap => "swap",
        }
    }

    pub fn num_angles(self) -> usize {
        match self {
            BaseGate::Rx | BaseGate::Ry | BaseGate::Rz | BaseGate::P => 1,
            BaseGate::U => 3,
            _ => 0,
        }
    }

    pub fn num_targets(self) -> usize {
        match self {
            BaseGate::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_self_inverse(self) -> bool {
        matches!(self, BaseGate::X | BaseGate::Y | BaseGate::Z | BaseGate::H | BaseGate::Swap)
    }

    /// Gates whose adjoint is expressed by negating angles rather than a flag.
    pub fn is_rotation(self) -> bool {
        matches!(self, BaseGate::Rx | BaseGate::Ry | BaseGate::Rz | BaseGate::P | BaseGate::U)
    }

    pub fn is_clifford(self) -> bool {
        matches!(
            self,
            BaseGate::X | BaseGate::Y | BaseGate::Z | BaseGate::H | BaseGate::S | BaseGate::Sx | BaseGate::Swap
        )
    }
}

impl fmt::Display for BaseGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Gates callable from source once `stdgates.inc` is included (plus `U`,
/// which is always in scope).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StdGate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Sx,
    Rx,
    Ry,
    Rz,
    P,
    U,
    Cx,
    Cy,
    Cz,
    Ch,
    Crz,
    Cp,
    Swap,
    Ccx,
}

impl StdGate {
    pub fn lookup(name: &str, stdgates: bool) -> Option<StdGate> {
        let g = match name {
            "U" => return Some(StdGate::U),
            "x" => StdGate::X,
            "y" => StdGate::Y,
            "z" => StdGate::Z,
            "h" => StdGate::H,
            "s" => StdGate::S,
            "sdg" => StdGate::Sdg,
            "t" => StdGate::T,
            "tdg" => StdGate::Tdg,
            "sx" => StdGate::Sx,
            "rx" => StdGate::Rx,
            "ry" => StdGate::Ry,
            "rz" => StdGate::Rz,
            "p" => StdGate::P,
            "u" => StdGate::U,
            "cx" | "CX" => StdGate::Cx,
            "cy" => StdGate::Cy,
            "cz" => StdGate::Cz,
            "ch" => StdGate::Ch,
            "crz" => StdGate::Crz,
            "cp" => StdGate::Cp,
            "swap" => StdGate::Swap,
            "ccx" => StdGate::Ccx,
            _ => return None,
        };
        stdgates.then_some(g)
    }

    /// Canonical form: base gate, number of built-in leading control operands,
    /// and whether the base is daggered.
    pub fn canonical(self) -> (BaseGate, usize, bool) {
        match self {
            StdGate::X => (BaseGate::X, 0, false),
            StdGate::Y => (BaseGate::Y, 0, false),
            StdGate::Z => (BaseGate::Z, 0, false),
            StdGate::H => (BaseGate::H, 0, false),
            StdGate::S => (BaseGate::S, 0, false),
            StdGate::Sdg => (BaseGate::S, 0, true),
            StdGate::T => (BaseGate::T, 0, false),
            StdGate::Tdg => (BaseGate::T, 0, true),
            StdGate::Sx => (BaseGate::Sx, 0, false),
            StdGate::Rx => (BaseGate::Rx, 0, false),
            StdGate::Ry => (BaseGate::Ry, 0, false),
            StdGate::Rz => (BaseGate::Rz, 0, false),
            StdGate::P => (BaseGate::P, 0, false),
            StdGate::U => (BaseGate::U, 0, false),
            StdGate::Cx => (BaseGate::X, 1, false),
            StdGate::Cy => (BaseGate::Y, 1, false),
            StdGate::Cz => (BaseGate::Z, 1, false),
            StdGate::Ch => (BaseGate::H, 1, false),
            StdGate::Crz => (BaseGate::Rz, 1, false),
            StdGate::Cp => (BaseGate::P, 1, false),
            StdGate::Swap => (BaseGate::Swap, 0, false),
            StdGate::Ccx => (BaseGate::X, 2, false),
        }
    }

    pub fn num_angles(self) -> usize {
        self.canonical().0.num_angles()
    }

    pub fn num_qubits(self) -> usize {
        let (base, ctrls, _) = self.canonical();
        base.num_targets() + ctrls
    }
}
