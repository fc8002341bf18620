use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::rng::RngStream;
use super::state::{apply_gate, collapse, measure, reset, StateVector};
use super::SimError;
use crate::kir::{BitLoc, BoundKernel, GateOp, KOp, Kernel, Predicate, PredicateSubject, RegisterDecl};

/// Classical bit registers. Unwritten bits read as 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStore {
    offsets: Vec<usize>,
    widths: Vec<usize>,
    bits: Vec<u8>,
}

impl ClassicalStore {
    pub fn new(layout: &[RegisterDecl]) -> Self {
        let mut offsets = Vec::with_capacity(layout.len());
        let mut total = 0;
        for r in layout {
            offsets.push(total);
            total += r.width;
        }
        Self { offsets, widths: layout.iter().map(|r| r.width).collect(), bits: vec![0; total] }
    }

    pub fn get(&self, bit: BitLoc) -> u8 {
        self.bits[self.offsets[bit.register] + bit.index]
    }

    pub fn set(&mut self, bit: BitLoc, value: u8) {
        self.bits[self.offsets[bit.register] + bit.index] = value;
    }

    /// Register value with bit 0 most significant.
    pub fn register_value(&self, register: usize) -> u64 {
        let start = self.offsets[register];
        self.bits[start..start + self.widths[register]].iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn subject_value(&self, subject: PredicateSubject) -> u64 {
        match subject {
            PredicateSubject::Bit(b) => u64::from(self.get(b)),
            PredicateSubject::Register(r) => self.register_value(r),
        }
    }

    /// Histogram key: registers in declaration order, bit 0 of each first.
    pub fn key(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    pub fn flat_bits(&self) -> &[u8] {
        &self.bits
    }
}

/// Hooks into trajectory execution, used to check invariants from tests.
pub trait Observer {
    fn after_op(&mut self, _state: &StateVector) {}
    fn branch(&mut self, _predicate: &Predicate, _store: &ClassicalStore, _took_then: bool) {}
}

impl Observer for () {}

/// Runs one shot: every op in order, with conditionals evaluated against the
/// live classical store.
pub fn run_trajectory(bk: &BoundKernel<'_>, rng: &mut RngStream) -> Result<(ClassicalStore, StateVector), SimError> {
    run_trajectory_observed(bk, rng, &mut ())
}

pub fn run_trajectory_observed(
    bk: &BoundKernel<'_>,
    rng: &mut RngStream,
    observer: &mut dyn Observer,
) -> Result<(ClassicalStore, StateVector), SimError> {
    let mut exec = Exec {
        bk,
        state: StateVector::new(bk.kernel.num_qubits),
        store: ClassicalStore::new(&bk.kernel.classical_layout),
        angles: Vec::with_capacity(3),
    };
    exec.ops(&bk.kernel.body, rng, observer)?;
    Ok((exec.store, exec.state))
}

struct Exec<'a, 'k> {
    bk: &'a BoundKernel<'k>,
    state: StateVector,
    store: ClassicalStore,
    angles: Vec<f64>,
}

impl Exec<'_, '_> {
    fn gate(&mut self, g: &GateOp) {
        self.angles.clear();
        self.angles.extend(g.angles.iter().map(|a| self.bk.angle(*a)));
        apply_gate(&mut self.state, g, &self.angles);
    }

    fn ops(&mut self, ops: &[KOp], rng: &mut RngStream, observer: &mut dyn Observer) -> Result<(), SimError> {
        for op in ops {
            match op {
                KOp::Gate(g) => self.gate(g),
                KOp::Measure { qubit, bit } => {
                    let v = measure(&mut self.state, *qubit, rng)?;
                    self.store.set(*bit, v);
                }
                KOp::Reset { qubit } => reset(&mut self.state, *qubit, rng)?,
                KOp::Nop => {}
                KOp::Cond(c) => {
                    let took_then = c.predicate.evaluate(self.store.subject_value(c.predicate.subject));
                    self.ops(if took_then { &c.then_ops } else { &c.else_ops }, rng, observer)?;
                    observer.branch(&c.predicate, &self.store, took_then);
                    continue;
                }
            }
            observer.after_op(&self.state);
        }
        Ok(())
    }
}

/// Counts per classical bitstring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShotHistogram {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl ShotHistogram {
    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn probability(&self, key: &str) -> f64 {
        self.count(key) as f64 / self.shots as f64
    }

    /// `bitstring count` lines in key order.
    pub fn to_lines(&self) -> String {
        self.counts.iter().map(|(k, v)| format!("{k} {v}\n")).collect()
    }
}

/// True when sampling the final distribution is equivalent to per-shot
/// trajectories: no conditionals, no resets, and no gate touches a qubit
/// after it has been measured.
pub fn is_sampleable_once(kernel: &Kernel) -> bool {
    let mut measured = vec![false; kernel.num_qubits];
    for op in &kernel.body {
        match op {
            KOp::Cond(_) | KOp::Reset { .. } => return false,
            KOp::Measure { qubit, .. } => measured[*qubit] = true,
            KOp::Gate(g) => {
                if g.qubits().any(|q| measured[q]) {
                    return false;
                }
            }
            KOp::Nop => {}
        }
    }
    true
}

pub fn sample(bk: &BoundKernel<'_>, shots: u64, seed: u64) -> Result<ShotHistogram, SimError> {
    sample_with_workers(bk, shots, seed, 0)
}

/// Samples `shots` shots. Shot `s` draws from its own stream derived from
/// `(seed, s)`, so the result does not depend on `workers` (0 means the
/// rayon default).
pub fn sample_with_workers(bk: &BoundKernel<'_>, shots: u64, seed: u64, workers: usize) -> Result<ShotHistogram, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let counts = if workers == 1 {
        sample_range(bk, 0..shots, seed)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| SimError::Workers(e.to_string()))?;
        pool.install(|| sample_parallel(bk, shots, seed))?
    };
    Ok(ShotHistogram { counts, shots })
}

type Counts = BTreeMap<String, u64>;

fn merge(mut a: Counts, b: Counts) -> Counts {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

fn sample_parallel(bk: &BoundKernel<'_>, shots: u64, seed: u64) -> Result<Counts, SimError> {
    const CHUNK: u64 = 256;
    let chunks = shots.div_ceil(CHUNK);
    if is_sampleable_once(bk.kernel) {
        let sampler = FinalSampler::new(bk);
        return Ok((0..chunks)
            .into_par_iter()
            .map(|c| sampler.shots(c * CHUNK..((c + 1) * CHUNK).min(shots), seed))
            .reduce(Counts::new, merge));
    }
    (0..chunks)
        .into_par_iter()
        .map(|c| trajectories(bk, c * CHUNK..((c + 1) * CHUNK).min(shots), seed))
        .try_reduce(Counts::new, |a, b| Ok(merge(a, b)))
}

fn sample_range(bk: &BoundKernel<'_>, range: std::ops::Range<u64>, seed: u64) -> Result<Counts, SimError> {
    if is_sampleable_once(bk.kernel) {
        Ok(FinalSampler::new(bk).shots(range, seed))
    } else {
        trajectories(bk, range, seed)
    }
}

fn trajectories(bk: &BoundKernel<'_>, range: std::ops::Range<u64>, seed: u64) -> Result<Counts, SimError> {
    let mut counts = Counts::new();
    for shot in range {
        let (store, _) = run_trajectory(bk, &mut RngStream::for_shot(seed, shot))?;
        *counts.entry(store.key()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Static-circuit fast path: one simulation, then one CDF lookup per shot.
struct FinalSampler<'a> {
    cdf: Vec<f64>,
    measures: Vec<(usize, BitLoc)>,
    layout: &'a [RegisterDecl],
}

impl<'a> FinalSampler<'a> {
    fn new(bk: &BoundKernel<'a>) -> Self {
        let mut state = StateVector::new(bk.kernel.num_qubits);
        let mut measures = Vec::new();
        let mut angles = Vec::new();
        for op in &bk.kernel.body {
            match op {
                KOp::Gate(g) => {
                    angles.clear();
                    angles.extend(g.angles.iter().map(|a| bk.angle(*a)));
                    apply_gate(&mut state, g, &angles);
                }
                KOp::Measure { qubit, bit } => measures.push((*qubit, *bit)),
                _ => {}
            }
        }
        let mut acc = 0.0;
        let cdf = state
            .amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Self { cdf, measures, layout: &bk.kernel.classical_layout }
    }

    fn outcome(&self, u: f64) -> usize {
        let total = *self.cdf.last().expect("non-empty state");
        let i = self.cdf.partition_point(|&c| c <= u * total);
        i.min(self.cdf.len() - 1)
    }

    fn shots(&self, range: std::ops::Range<u64>, seed: u64) -> Counts {
        let mut counts = Counts::new();
        for shot in range {
            let index = self.outcome(RngStream::for_shot(seed, shot).uniform());
            let mut store = ClassicalStore::new(self.layout);
            for &(q, bit) in &self.measures {
                store.set(bit, ((index >> q) & 1) as u8);
            }
            *counts.entry(store.key()).or_insert(0) += 1;
        }
        counts
    }
}

/// Final state of a static kernel.
pub fn statevector(bk: &BoundKernel<'_>) -> Result<StateVector, SimError> {
    if bk.kernel.is_dynamic() {
        return Err(SimError::DynamicCircuit);
    }
    let mut state = StateVector::new(bk.kernel.num_qubits);
    let mut angles = Vec::new();
    for op in &bk.kernel.body {
        if let KOp::Gate(g) = op {
            angles.clear();
            angles.extend(g.angles.iter().map(|a| bk.angle(*a)));
            apply_gate(&mut state, g, &angles);
        }
    }
    Ok(state)
}

/// Projects onto a chosen outcome without drawing; used to enumerate branches.
pub fn project(state: &mut StateVector, qubit: usize, outcome: u8) -> Result<f64, SimError> {
    let p1 = state.prob_one(qubit);
    let p = if outcome == 1 { p1 } else { 1.0 - p1 };
    collapse(state, qubit, outcome, p)?;
    Ok(p)
}
