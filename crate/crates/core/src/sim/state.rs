use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::rng::RngStream;
use super::SimError;
use crate::kir::{BaseGate, GateOp, Polarity};

pub type Mat2 = [[C64; 2]; 2];

/// Dense state of `n` qubits. Basis index `i` has qubit `k` in bit `k` of `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// Wraps raw amplitudes. Panics unless the length is a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        assert!(amps.len().is_power_of_two(), "amplitude count must be a power of two");
        Self { n: amps.len().trailing_zeros() as usize, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal probability that `qubit` reads 1.
    pub fn prob_one(&self, qubit: usize) -> f64 {
        let bit = 1 << qubit;
        self.amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

/// The 2×2 matrix of a single-target gate, daggered when `adjoint` is set.
pub fn gate_matrix(base: BaseGate, angles: &[f64], adjoint: bool) -> Mat2 {
    let c = C64::new;
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let e = |t: f64| C64::from_polar(1.0, t);
    let m = match base {
        BaseGate::X => [[z, one], [one, z]],
        BaseGate::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        BaseGate::Z => [[one, z], [z, -one]],
        BaseGate::H => [[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]],
        BaseGate::S => [[one, z], [z, c(0.0, 1.0)]],
        BaseGate::T => [[one, z], [z, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]],
        BaseGate::Sx => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        BaseGate::Rx => {
            let (s, co) = (angles[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        BaseGate::Ry => {
            let (s, co) = (angles[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        BaseGate::Rz => [[e(-angles[0] / 2.0), z], [z, e(angles[0] / 2.0)]],
        BaseGate::P => [[one, z], [z, e(angles[0])]],
        BaseGate::U => {
            let (theta, phi, lambda) = (angles[0], angles[1], angles[2]);
            let (s, co) = (theta / 2.0).sin_cos();
            [[c(co, 0.0), -e(lambda) * s], [e(phi) * s, e(phi + lambda) * co]]
        }
        BaseGate::Swap => panic!("swap has no 2x2 matrix"),
    };
    if adjoint {
        [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
    } else {
        m
    }
}

/// Applies a gate with already-resolved angles.
pub fn apply_gate(state: &mut StateVector, op: &GateOp, angles: &[f64]) {
    let mut ctrl_mask = 0usize;
    let mut ctrl_want = 0usize;
    for c in &op.controls {
        ctrl_mask |= 1 << c.qubit;
        if c.polarity == Polarity::Pos {
            ctrl_want |= 1 << c.qubit;
        }
    }
    let fires = |i: usize| i & ctrl_mask == ctrl_want;
    let amps = &mut state.amps;

    if op.base == BaseGate::Swap {
        let (a, b) = (1usize << op.targets[0], 1usize << op.targets[1]);
        for i in 0..amps.len() {
            if i & a != 0 && i & b == 0 && fires(i) {
                amps.swap(i, i ^ a ^ b);
            }
        }
        return;
    }

    let m = gate_matrix(op.base, angles, op.adjoint);
    let t = op.targets[0];
    let bit = 1usize << t;
    let low = bit - 1;
    for k in 0..amps.len() / 2 {
        let i0 = ((k & !low) << 1) | (k & low);
        if !fires(i0) {
            continue;
        }
        let i1 = i0 | bit;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = m[0][0] * a0 + m[0][1] * a1;
        amps[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
}

/// Projective measurement in the computational basis. Returns the outcome.
pub fn measure(state: &mut StateVector, qubit: usize, rng: &mut RngStream) -> Result<u8, SimError> {
    let p1 = state.prob_one(qubit);
    let outcome = u8::from(rng.uniform() < p1);
    collapse(state, qubit, outcome, if outcome == 1 { p1 } else { 1.0 - p1 })?;
    Ok(outcome)
}

/// Projects `qubit` onto `outcome`, which has probability `p`, and renormalizes.
pub fn collapse(state: &mut StateVector, qubit: usize, outcome: u8, p: f64) -> Result<(), SimError> {
    if p < 1e-15 {
        return Err(SimError::DegenerateNorm { qubit, probability: p });
    }
    let bit = 1 << qubit;
    let keep = if outcome == 1 { bit } else { 0 };
    let scale = 1.0 / p.sqrt();
    for (i, a) in state.amps.iter_mut().enumerate() {
        if i & bit == keep {
            *a *= scale;
        } else {
            *a = C64::new(0.0, 0.0);
        }
    }
    Ok(())
}

/// Measures `qubit` and flips it back to `|0⟩` on outcome 1.
pub fn reset(state: &mut StateVector, qubit: usize, rng: &mut RngStream) -> Result<(), SimError> {
    if measure(state, qubit, rng)? == 1 {
        apply_gate(state, &GateOp::new(BaseGate::X, vec![], vec![qubit]), &[]);
    }
    Ok(())
}

/// `⟨ψ|P|ψ⟩` for a Pauli string whose character `k` acts on qubit `k`.
pub fn expval_pauli(state: &StateVector, pauli: &str) -> Result<f64, SimError> {
    if pauli.chars().count() != state.n {
        return Err(SimError::BadPauliString {
            reason: format!("length {} does not match {} qubits", pauli.chars().count(), state.n),
        });
    }
    let (mut xmask, mut zmask, mut ny) = (0usize, 0usize, 0u32);
    for (k, ch) in pauli.chars().enumerate() {
        match ch.to_ascii_uppercase() {
            'I' => {}
            'X' => xmask |= 1 << k,
            'Z' => zmask |= 1 << k,
            'Y' => {
                xmask |= 1 << k;
                zmask |= 1 << k;
                ny += 1;
            }
            other => return Err(SimError::BadPauliString { reason: format!("invalid character `{other}`") }),
        }
    }
    // Y = i·X·Z, so P|i⟩ = i^ny · (-1)^{popcount(i & zmask)} |i ^ xmask⟩.
    let phase = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][(ny % 4) as usize];
    let mut acc = C64::new(0.0, 0.0);
    for (i, a) in state.amps.iter().enumerate() {
        let sign = if (i & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        acc += state.amps[i ^ xmask].conj() * a * sign;
    }
    Ok((acc * phase).re)
}
