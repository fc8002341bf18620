use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::HarnessError;
use crate::kir::{BaseGate, BoundKernel, GateOp, KOp, Polarity};
use crate::sim::StateVector;

/// Largest qubit count the dense oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 8;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    /// Column `col`, i.e. the image of basis state `col`.
    pub fn column(&self, col: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }
}

type M2 = [[C64; 2]; 2];

fn m2_add(a: M2, b: M2, wa: C64, wb: C64) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = wa * a[r][c] + wb * b[r][c];
        }
    }
    out
}

fn m2_mul(a: M2, b: M2) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// Single-qubit matrices assembled from Pauli algebra, independently of the
/// simulator's gate table: rotations are `cos(θ/2)·I − i·sin(θ/2)·P` and `u`
/// is `e^{i(φ+λ)/2}·rz(φ)·ry(θ)·rz(λ)`.
fn oracle_matrix(base: BaseGate, a: &[f64]) -> M2 {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let id: M2 = [[one, zero], [zero, one]];
    let px: M2 = [[zero, one], [one, zero]];
    let py: M2 = [[zero, -i], [i, zero]];
    let pz: M2 = [[one, zero], [zero, -one]];
    let rot = |p: M2, t: f64| m2_add(id, p, C64::new((t / 2.0).cos(), 0.0), -i * (t / 2.0).sin());
    let phase = |t: f64| -> M2 { [[one, zero], [zero, C64::from_polar(1.0, t)]] };
    match base {
        BaseGate::X => px,
        BaseGate::Y => py,
        BaseGate::Z => pz,
        BaseGate::H => m2_add(px, pz, C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)),
        BaseGate::S => phase(std::f64::consts::FRAC_PI_2),
        BaseGate::T => phase(std::f64::consts::FRAC_PI_4),
        BaseGate::Sx => m2_add(id, px, C64::new(0.5, 0.5), C64::new(0.5, -0.5)),
        BaseGate::Rx => rot(px, a[0]),
        BaseGate::Ry => rot(py, a[0]),
        BaseGate::Rz => rot(pz, a[0]),
        BaseGate::P => phase(a[0]),
        BaseGate::U => {
            let (theta, phi, lambda) = (a[0], a[1], a[2]);
            let m = m2_mul(m2_mul(rot(pz, phi), rot(py, theta)), rot(pz, lambda));
            m2_add(m, id, C64::from_polar(1.0, (phi + lambda) / 2.0), zero)
        }
        BaseGate::Swap => unreachable!("swap handled as a permutation"),
    }
}

/// Sparse full-space image of basis state `col` under `op`: at most two
/// `(row, amplitude)` entries.
fn gate_column(op: &GateOp, m: &Option<M2>, col: usize) -> ([(usize, C64); 2], usize) {
    let zero = C64::new(0.0, 0.0);
    let active = op.controls.iter().all(|c| ((col >> c.qubit) & 1 == 1) == (c.polarity == Polarity::Pos));
    if !active {
        return ([(col, C64::new(1.0, 0.0)), (0, zero)], 1);
    }
    match m {
        None => {
            let (a, b) = (op.targets[0], op.targets[1]);
            let (ba, bb) = ((col >> a) & 1, (col >> b) & 1);
            let row = (col & !(1 << a) & !(1 << b)) | (bb << a) | (ba << b);
            ([(row, C64::new(1.0, 0.0)), (0, zero)], 1)
        }
        Some(m) => {
            let t = op.targets[0];
            let bit = (col >> t) & 1;
            let r0 = col & !(1 << t);
            ([(r0, m[0][bit]), (r0 | (1 << t), m[1][bit])], 2)
        }
    }
}

/// Ordered product of full-space gate matrices of a static kernel.
pub fn oracle_unitary(bk: &BoundKernel<'_>) -> Result<Matrix, HarnessError> {
    let k = bk.kernel;
    if k.num_qubits > ORACLE_MAX_QUBITS {
        return Err(HarnessError::TooLarge { qubits: k.num_qubits, limit: ORACLE_MAX_QUBITS });
    }
    let dim = 1usize << k.num_qubits;
    let mut u = Matrix::identity(dim);
    for op in &k.body {
        let g = match op {
            KOp::Gate(g) => g,
            KOp::Nop => continue,
            _ => return Err(HarnessError::DynamicCircuit),
        };
        let angles: Vec<f64> = g.angles.iter().map(|a| bk.angle(*a)).collect();
        let m = (g.base != BaseGate::Swap).then(|| {
            let m = oracle_matrix(g.base, &angles);
            if g.adjoint {
                [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
            } else {
                m
            }
        });
        // next = G · u, one column of G at a time: G·u = Σ_k G[:,k] ⊗ u[k,:].
        let mut next = vec![C64::new(0.0, 0.0); dim * dim];
        for kcol in 0..dim {
            let (entries, len) = gate_column(g, &m, kcol);
            for &(row, amp) in &entries[..len] {
                let src = &u.data[kcol * dim..(kcol + 1) * dim];
                let dst = &mut next[row * dim..(row + 1) * dim];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += amp * s;
                }
            }
        }
        u.data = next;
    }
    Ok(u)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity_up_to_global_phase(a: &StateVector, b: &StateVector) -> Result<f64, HarnessError> {
    if a.num_qubits() != b.num_qubits() {
        return Err(HarnessError::DimensionMismatch { left: a.num_qubits(), right: b.num_qubits() });
    }
    Ok(a.inner(b).norm_sqr())
}
