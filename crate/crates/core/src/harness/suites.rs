use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::circuits::{
    bernstein_vazirani_source, conditional_reset_source, hea_source, qft_source, teleport_source, RandomCircuitSpec,
};
use super::oracle::{fidelity_up_to_global_phase, oracle_unitary};
use super::{compile_for_suite, CaseResult, HarnessError, Relation, Sabotage, SuiteReport};
use crate::kir::{bind, lower_count, Kernel};
use crate::sim::{expval_pauli, mix, sample, statevector, RngStream, ShotHistogram, StateVector};

/// Minimum P(|0⟩) for the conditional reset cases.
pub const RESET_THRESHOLD: f64 = 0.999;
/// Minimum state fidelity for oracle and uncompute comparisons.
pub const FIDELITY_TOLERANCE: f64 = 1e-10;
/// Maximum |simulated − oracle| for VQE expectation values.
pub const VQE_TOLERANCE: f64 = 1e-9;

/// Fraction of shots whose flat bit `index` reads 0.
fn zero_fraction(h: &ShotHistogram, index: usize) -> f64 {
    let zeros: u64 = h.counts.iter().filter(|(k, _)| k.as_bytes()[index] == b'0').map(|(_, v)| v).sum();
    zeros as f64 / h.shots as f64
}

fn report(suite: &str, start: Instant, cases: Vec<CaseResult>) -> SuiteReport {
    SuiteReport { suite: suite.to_string(), cases, wall_time: start.elapsed() }
}

/// Measure-and-flip on |+⟩ and |−⟩; both must end in |0⟩.
pub fn suite_conditional_reset(shots: u64, seed: u64, sabotage: Sabotage) -> Result<SuiteReport, HarnessError> {
    let start = Instant::now();
    let mut cases = Vec::new();
    for (name, prep) in [("plus", "h q;"), ("minus", "x q;\nh q;")] {
        let kernel = compile_for_suite(&conditional_reset_source(prep), sabotage)?;
        let bk = bind(&kernel, Vec::new())?;
        let h = sample(&bk, shots, seed)?;
        let r = kernel.flat_bit(crate::kir::BitLoc { register: 1, index: 0 });
        cases.push(CaseResult::new(name, zero_fraction(&h, r), Relation::AtLeast, RESET_THRESHOLD));
    }
    Ok(report("reset", start, cases))
}

/// Teleportation followed by uncompute; every shot must return 0.
pub fn suite_teleport(shots: u64, seed: u64, sabotage: Sabotage) -> Result<SuiteReport, HarnessError> {
    let start = Instant::now();
    let mut rng = RngStream::new(mix(seed, 0x7e1e));
    let random = (rng.uniform() * PI, (2.0 * rng.uniform() - 1.0) * PI, (2.0 * rng.uniform() - 1.0) * PI);
    let mut cases = Vec::new();
    for (name, (t, p, l)) in [("identity", (0.0, 0.0, 0.0)), ("ry(1.234)", (1.234, 0.0, 0.0)), ("random-u", random)] {
        let kernel = compile_for_suite(&teleport_source(t, p, l), sabotage)?;
        let bk = bind(&kernel, Vec::new())?;
        let h = sample(&bk, shots, seed)?;
        let r = kernel.flat_bit(crate::kir::BitLoc { register: 1, index: 0 });
        cases.push(CaseResult::new(name, zero_fraction(&h, r), Relation::Equal, 1.0));
    }
    Ok(report("teleport", start, cases))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliffordConfig {
    /// Oracle cases, n ∈ [2, 8].
    pub oracle_cases: usize,
    /// Uncompute cases, n ∈ [9, 16].
    pub uncompute_cases: usize,
    /// Normalization-only cases, n ∈ [17, 20].
    pub smoke_cases: usize,
    pub workers: usize,
}

impl Default for CliffordConfig {
    fn default() -> Self {
        Self { oracle_cases: 200, uncompute_cases: 20, smoke_cases: 2, workers: 0 }
    }
}

#[derive(Debug, Clone, Copy)]
enum Mode {
    Oracle,
    Uncompute,
    Smoke,
}

fn clifford_case(mode: Mode, case_seed: u64) -> Result<CaseResult, HarnessError> {
    let mut rng = RngStream::new(case_seed);
    let mut pick = |lo: u64, hi: u64| (lo + rng.next_u64() % (hi - lo + 1)) as usize;
    let (lo, hi) = match mode {
        Mode::Oracle => (2, 8),
        Mode::Uncompute => (9, 16),
        Mode::Smoke => (17, 20),
    };
    let spec = RandomCircuitSpec { qubits: pick(lo, hi), gates: pick(10, 100), rotations: false, seed: case_seed };
    let name = format!("{}-n{}-d{}", mode_tag(mode), spec.qubits, spec.gates);
    let source = match mode {
        Mode::Uncompute => spec.render_with_uncompute(),
        _ => spec.render(),
    };
    let kernel = crate::compile(&source)?;
    let bk = bind(&kernel, Vec::new())?;
    let state = statevector(&bk)?;
    Ok(match mode {
        Mode::Oracle => {
            let expected = StateVector::from_amplitudes(oracle_unitary(&bk)?.column(0));
            let f = fidelity_up_to_global_phase(&state, &expected)?;
            CaseResult::new(name, f, Relation::AtLeast, 1.0 - FIDELITY_TOLERANCE)
        }
        Mode::Uncompute => {
            let f = state.amplitudes()[0].norm_sqr();
            CaseResult::new(name, f, Relation::AtLeast, 1.0 - FIDELITY_TOLERANCE)
        }
        Mode::Smoke => CaseResult::new(name, (state.norm_sqr() - 1.0).abs(), Relation::AtMost, FIDELITY_TOLERANCE),
    })
}

fn mode_tag(mode: Mode) -> &'static str {
    match mode {
        Mode::Oracle => "oracle",
        Mode::Uncompute => "uncompute",
        Mode::Smoke => "smoke",
    }
}

/// Random Clifford circuits against the dense oracle (small n) or their own
/// inverse (larger n). Case `i` uses seed `mix(seed, i)`, so the report does
/// not depend on the worker count.
pub fn suite_clifford_differential(cfg: &CliffordConfig, seed: u64) -> Result<SuiteReport, HarnessError> {
    let start = Instant::now();
    let plan: Vec<Mode> = std::iter::repeat_n(Mode::Oracle, cfg.oracle_cases)
        .chain(std::iter::repeat_n(Mode::Uncompute, cfg.uncompute_cases))
        .chain(std::iter::repeat_n(Mode::Smoke, cfg.smoke_cases))
        .collect();
    let run = |(i, mode): (usize, &Mode)| clifford_case(*mode, mix(seed, i as u64));
    let cases: Result<Vec<_>, _> = if cfg.workers == 1 {
        plan.iter().enumerate().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| HarnessError::from(crate::sim::SimError::Workers(e.to_string())))?;
        pool.install(|| plan.par_iter().enumerate().map(run).collect())
    };
    Ok(report("clifford", start, cases?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig {
    pub qubits: usize,
    pub layers: usize,
    pub iterations: usize,
    pub hamiltonian: String,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self { qubits: 4, layers: 2, iterations: 50, hamiltonian: "ZZII".to_string() }
    }
}

/// ⟨ψ|P|ψ⟩ for a Z/I string, straight from basis probabilities.
fn oracle_z_expval(amps: &[C64], pauli: &str) -> f64 {
    let mask = pauli.bytes().enumerate().filter(|(_, c)| *c == b'Z').fold(0usize, |m, (i, _)| m | (1 << i));
    amps.iter()
        .enumerate()
        .map(|(i, a)| if (i & mask).count_ones() % 2 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

fn vqe_eval(kernel: &Kernel, theta: &[f64], pauli: &str) -> Result<f64, HarnessError> {
    let bk = bind(kernel, theta.to_vec())?;
    Ok(expval_pauli(&statevector(&bk)?, pauli)?)
}

/// Compile once, bind many times; compares against a recompile-every-iteration loop.
pub fn suite_vqe(cfg: &VqeConfig, seed: u64) -> Result<SuiteReport, HarnessError> {
    assert!(cfg.hamiltonian.bytes().all(|c| c == b'Z' || c == b'I'), "oracle handles Z/I strings only");
    let start = Instant::now();
    let source = hea_source(cfg.qubits, cfg.layers);
    let mut rng = RngStream::new(mix(seed, 0x70e));
    let thetas: Vec<Vec<f64>> = (0..cfg.iterations)
        .map(|_| (0..cfg.qubits * cfg.layers).map(|_| (2.0 * rng.uniform() - 1.0) * PI).collect())
        .collect();

    let before = lower_count();
    let t0 = Instant::now();
    let kernel = crate::compile(&source)?;
    let mut bound_values = Vec::with_capacity(thetas.len());
    for theta in &thetas {
        bound_values.push(vqe_eval(&kernel, theta, &cfg.hamiltonian)?);
    }
    let bound_time = t0.elapsed();
    let bound_lowers = lower_count() - before;

    let before = lower_count();
    let t0 = Instant::now();
    for theta in &thetas {
        let k = crate::compile(&source)?;
        vqe_eval(&k, theta, &cfg.hamiltonian)?;
    }
    let reparse_time = t0.elapsed();
    let reparse_lowers = lower_count() - before;

    let mut cases = Vec::new();
    for (i, (theta, value)) in thetas.iter().zip(&bound_values).enumerate() {
        let bk = bind(&kernel, theta.clone())?;
        let expected = oracle_z_expval(&oracle_unitary(&bk)?.column(0), &cfg.hamiltonian);
        cases.push(CaseResult::new(format!("iter-{i:02}"), (value - expected).abs(), Relation::AtMost, VQE_TOLERANCE));
    }
    cases.push(CaseResult::new("bound-lower-count", bound_lowers as f64, Relation::Equal, 1.0));
    cases.push(CaseResult::new("reparse-lower-count", reparse_lowers as f64, Relation::Equal, cfg.iterations as f64));
    cases.push(CaseResult::new("latency-ratio", ratio(bound_time, reparse_time), Relation::Below, 1.0));
    Ok(report("vqe", start, cases))
}

fn ratio(a: Duration, b: Duration) -> f64 {
    a.as_secs_f64() / b.as_secs_f64().max(f64::MIN_POSITIVE)
}

/// Bernstein–Vazirani string recovery and QFT against the DFT matrix.
pub fn suite_algorithms(shots: u64, seed: u64) -> Result<SuiteReport, HarnessError> {
    let start = Instant::now();
    let mut rng = RngStream::new(mix(seed, 0xb5));
    let mut cases = Vec::new();
    for i in 0..20 {
        let len = 3 + (rng.next_u64() % 6) as usize;
        let hidden: String = (0..len).map(|_| if rng.next_u64() & 1 == 1 { '1' } else { '0' }).collect();
        let kernel = crate::compile(&bernstein_vazirani_source(&hidden))?;
        let h = sample(&bind(&kernel, Vec::new())?, shots, mix(seed, i))?;
        cases.push(CaseResult::new(format!("bv-{hidden}"), h.probability(&hidden), Relation::Equal, 1.0));
    }
    for n in 1..=6usize {
        let dim = 1usize << n;
        let input = (rng.next_u64() as usize) % dim;
        let kernel = crate::compile(&qft_source(n, input))?;
        let state = statevector(&bind(&kernel, Vec::new())?)?;
        let expected = StateVector::from_amplitudes(dft_column(dim, input));
        let f = fidelity_up_to_global_phase(&state, &expected)?;
        cases.push(CaseResult::new(format!("qft-n{n}-e{input}"), f, Relation::AtLeast, 1.0 - FIDELITY_TOLERANCE));
    }
    Ok(report("algos", start, cases))
}

/// Column `x` of the unitary DFT matrix: `e^{2πi·x·k/N}/√N`.
pub fn dft_column(dim: usize, x: usize) -> Vec<C64> {
    let norm = 1.0 / (dim as f64).sqrt();
    (0..dim).map(|k| C64::from_polar(norm, 2.0 * PI * ((x * k) % dim) as f64 / dim as f64)).collect()
}
