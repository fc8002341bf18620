use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qasm2cudaq::emit::{emit, EmissionTarget};
use qasm2cudaq::harness::{self, Sabotage, ValidateOptions};
use qasm2cudaq::kir::{bind, bind_named};
use qasm2cudaq::sim::{expval_pauli, sample_with_workers, statevector};

#[derive(Parser)]
#[command(name = "qasm2cudaq", version, about = "OpenQASM 3.0 to CUDA-Q transpiler and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit CUDA-Q kernel source for an OpenQASM file.
    Transpile {
        file: PathBuf,
        #[arg(long, default_value = "cudaq-cpp")]
        target: EmissionTarget,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the kernel IR to stderr.
        #[arg(long)]
        dump_ir: bool,
    },
    /// Simulate an OpenQASM file and print `bitstring count` lines.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Input values as `name=v1,v2,...`; repeat for each input.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, Vec<f64>)>,
        /// Print the expectation value of a Pauli string instead of sampling.
        #[arg(long)]
        expval: Option<String>,
        /// Print final amplitudes instead of sampling.
        #[arg(long)]
        statevector: bool,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Run the built-in validation suites; exits 0 iff every case passes.
    Validate {
        /// reset, teleport, clifford, vqe, algos or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long)]
        json: bool,
        /// Comma-separated mutations: invert-predicates, drop-corrections.
        #[arg(long, default_value = "")]
        sabotage: String,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// List every case, not only failures.
        #[arg(short, long)]
        verbose: bool,
    },
}

fn parse_param(s: &str) -> Result<(String, Vec<f64>), String> {
    let (name, values) = s.split_once('=').ok_or("expected name=v1,v2,...")?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad value `{v}`: {e}")))
        .collect::<Result<_, _>>()?;
    Ok((name.trim().to_string(), values))
}

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn read(path: &Path) -> Result<String, Box<dyn std::error::Error>> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn transpile(file: &Path, target: EmissionTarget, output: Option<&Path>, dump_ir: bool) -> CliResult {
    let kernel = qasm2cudaq::compile(&read(file)?)?;
    if dump_ir {
        eprint!("{}", kernel.dump());
    }
    let emitted = emit(&kernel, target)?;
    match output {
        Some(p) => fs::write(p, &emitted.text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{}", emitted.text),
    }
    Ok(ExitCode::SUCCESS)
}

struct RunArgs {
    shots: u64,
    seed: u64,
    params: Vec<(String, Vec<f64>)>,
    expval: Option<String>,
    statevector: bool,
    workers: usize,
}

fn run(file: &Path, a: RunArgs) -> CliResult {
    let kernel = qasm2cudaq::compile(&read(file)?)?;
    let bk = if a.params.is_empty() { bind(&kernel, Vec::new())? } else { bind_named(&kernel, &a.params)? };
    if a.statevector || a.expval.is_some() {
        let state = statevector(&bk)?;
        if a.statevector {
            for (i, amp) in state.amplitudes().iter().enumerate() {
                println!("{i:0w$b} {:+.12} {:+.12}", amp.re, amp.im, w = kernel.num_qubits.max(1));
            }
        }
        if let Some(p) = &a.expval {
            println!("{:.12}", expval_pauli(&state, p)?);
        }
        return Ok(ExitCode::SUCCESS);
    }
    print!("{}", sample_with_workers(&bk, a.shots, a.seed, a.workers)?.to_lines());
    Ok(ExitCode::SUCCESS)
}

fn validate(suite: &str, opts: ValidateOptions, json: bool, verbose: bool) -> CliResult {
    let mut reports = Vec::new();
    for s in harness::parse_selection(suite)? {
        reports.push(harness::run_suite(s, &opts)?);
    }
    let passed = reports.iter().all(|r| r.passed());
    if json {
        let doc = serde_json::json!({ "passed": passed, "seed": opts.seed, "shots": opts.shots, "suites": reports });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        for r in &reports {
            print!("{}", r.render(verbose));
        }
        println!("overall: {}", if passed { "PASS" } else { "FAIL" });
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Transpile { file, target, output, dump_ir } => transpile(&file, target, output.as_deref(), dump_ir),
        Command::Run { file, shots, seed, params, expval, statevector, workers } => {
            run(&file, RunArgs { shots, seed, params, expval, statevector, workers })
        }
        Command::Validate { suite, seed, shots, json, sabotage, workers, verbose } => match Sabotage::parse_list(&sabotage) {
            Ok(sabotage) => validate(&suite, ValidateOptions { seed, shots, sabotage, workers }, json, verbose),
            Err(e) => Err(e.into()),
        },
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
