//! Validation suites, the dense unitary oracle and random circuit generators.
//!
//! Every suite starts from OpenQASM source text so each case exercises the
//! whole pipeline.

mod circuits;
mod oracle;
mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

pub use circuits::{
    bernstein_vazirani_source, conditional_reset_source, hea_source, qft_source, teleport_source, RandomCircuitSpec,
};
pub use oracle::{fidelity_up_to_global_phase, oracle_unitary, Matrix, ORACLE_MAX_QUBITS};
pub use suites::{
    suite_algorithms, suite_clifford_differential, suite_conditional_reset, suite_teleport, suite_vqe, CliffordConfig,
    VqeConfig, dft_column, FIDELITY_TOLERANCE, RESET_THRESHOLD, VQE_TOLERANCE,
};

use crate::kir::{KOp, Kernel};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("oracle supports at most {limit} qubits, kernel has {qubits}")]
    TooLarge { qubits: usize, limit: usize },
    #[error("oracle requires a static kernel")]
    DynamicCircuit,
    #[error("state dimensions differ: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown sabotage switch `{0}`")]
    UnknownSabotage(String),
    #[error(transparent)]
    Pipeline(#[from] crate::Error),
}

impl From<crate::sim::SimError> for HarnessError {
    fn from(e: crate::sim::SimError) -> Self {
        HarnessError::Pipeline(e.into())
    }
}

impl From<crate::kir::BindError> for HarnessError {
    fn from(e: crate::kir::BindError) -> Self {
        HarnessError::Pipeline(e.into())
    }
}

/// How a case metric is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    AtMost,
    Below,
    Equal,
}

impl Relation {
    pub fn holds(self, metric: f64, threshold: f64) -> bool {
        match self {
            Relation::AtLeast => metric >= threshold,
            Relation::AtMost => metric <= threshold,
            Relation::Below => metric < threshold,
            Relation::Equal => metric == threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::Equal => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    pub metric: f64,
    pub threshold: f64,
    pub relation: Relation,
}

impl CaseResult {
    pub fn new(name: impl Into<String>, metric: f64, relation: Relation, threshold: f64) -> Self {
        Self { name: name.into(), passed: relation.holds(metric, threshold), metric, threshold, relation }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
    #[serde(rename = "wall_time_s", serialize_with = "secs")]
    pub wall_time: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.passed)
    }

    /// The report without timing, for determinism comparisons.
    pub fn outcome(&self) -> (&str, &[CaseResult]) {
        (&self.suite, &self.cases)
    }
}

impl SuiteReport {
    /// Summary line plus one line per case; only failing cases unless `verbose`.
    pub fn render(&self, verbose: bool) -> String {
        let passed = self.cases.iter().filter(|c| c.passed).count();
        let mut out = format!(
            "suite {}: {} ({}/{} cases, {:.3}s)\n",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            passed,
            self.cases.len(),
            self.wall_time.as_secs_f64()
        );
        for c in self.cases.iter().filter(|c| verbose || !c.passed) {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            out += &format!("  {tag} {:<28} {:.12e} {} {:e}\n", c.name, c.metric, c.relation.symbol(), c.threshold);
        }
        out
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}

/// Post-lowering mutations used to check that suites can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Sabotage {
    /// Negates every branch predicate.
    pub invert_predicates: bool,
    /// Empties every conditional body.
    pub drop_corrections: bool,
}

impl Sabotage {
    pub fn is_active(&self) -> bool {
        self.invert_predicates || self.drop_corrections
    }

    /// Parses a comma-separated list of `invert-predicates`, `drop-corrections`.
    pub fn parse_list(text: &str) -> Result<Self, HarnessError> {
        let mut s = Sabotage::default();
        for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "invert-predicates" => s.invert_predicates = true,
                "drop-corrections" => s.drop_corrections = true,
                other => return Err(HarnessError::UnknownSabotage(other.to_string())),
            }
        }
        Ok(s)
    }

    pub fn apply(&self, kernel: &mut Kernel) {
        if self.is_active() {
            self.apply_ops(&mut kernel.body);
        }
    }

    fn apply_ops(&self, ops: &mut [KOp]) {
        for op in ops {
            if let KOp::Cond(c) = op {
                if self.invert_predicates {
                    c.predicate = c.predicate.negated();
                }
                if self.drop_corrections {
                    c.then_ops.clear();
                    c.else_ops.clear();
                }
                self.apply_ops(&mut c.then_ops);
                self.apply_ops(&mut c.else_ops);
            }
        }
    }
}

/// Compiles `source` and applies `sabotage` to the lowered kernel.
pub fn compile_for_suite(source: &str, sabotage: Sabotage) -> Result<Kernel, HarnessError> {
    let mut k = crate::compile(source)?;
    sabotage.apply(&mut k);
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Reset,
    Teleport,
    Clifford,
    Vqe,
    Algos,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Reset, Suite::Teleport, Suite::Clifford, Suite::Vqe, Suite::Algos];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Reset => "reset",
            Suite::Teleport => "teleport",
            Suite::Clifford => "clifford",
            Suite::Vqe => "vqe",
            Suite::Algos => "algos",
        }
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.id() == s).ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

/// Suite selection: one suite or `all`.
pub fn parse_selection(s: &str) -> Result<Vec<Suite>, HarnessError> {
    if s == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub seed: u64,
    pub shots: u64,
    pub sabotage: Sabotage,
    /// Worker threads for the Clifford suite; 0 uses the rayon default.
    pub workers: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { seed: 42, shots: 1000, sabotage: Sabotage::default(), workers: 0 }
    }
}

pub fn run_suite(suite: Suite, opts: &ValidateOptions) -> Result<SuiteReport, HarnessError> {
    match suite {
        Suite::Reset => suite_conditional_reset(opts.shots, opts.seed, opts.sabotage),
        Suite::Teleport => suite_teleport(opts.shots, opts.seed, opts.sabotage),
        Suite::Clifford => {
            suite_clifford_differential(&CliffordConfig { workers: opts.workers, ..CliffordConfig::default() }, opts.seed)
        }
        Suite::Vqe => suite_vqe(&VqeConfig::default(), opts.seed),
        Suite::Algos => suite_algorithms(opts.shots, opts.seed),
    }
}
