//! `mpsim` command-line driver.
//!
//! Exit status: 0 on success, 1 on a usage error (bad arguments, missing
//! input file), 2 when the simulation or benchmark itself fails. Diagnostics
//! go to standard error; data goes to standard output or `--out`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use mpsim::bench::{
    self, read_csv, run_engine, runtime_fit, BenchConfig, Engine, Experiment, FinalState,
};
use mpsim::circuit::qasm::parse_qasm_file;
use mpsim::{StateVector, TruncationPolicy, C64};

#[derive(Parser)]
#[command(
    name = "mpsim",
    version,
    about = "Matrix product state circuit simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an OpenQASM 2.0 circuit from |0…0⟩ and report the final state.
    Run {
        circuit: PathBuf,
        #[arg(long, value_parser = parse_engine)]
        engine: Engine,
        #[arg(long, default_value_t = 1024)]
        max_kept: usize,
        #[arg(long, default_value_t = 0.0)]
        rel_cutoff: f64,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the benchmark experiments and write the results CSV.
    Bench {
        #[arg(value_parser = parse_experiment)]
        experiment: Experiment,
        /// JSON config file, or `defaults` for the published parameters.
        #[arg(long, default_value = "defaults")]
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the aggregated summary as JSON.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Fidelity |⟨a|b⟩|² between two state reports written by `run`.
    Fidelity {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Log-log runtime slopes of the shallow rows of a results CSV.
    Slope {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: mpsim::Error| e.to_string())
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: mpsim::Error| e.to_string())
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<mpsim::Error> for Failure {
    fn from(e: mpsim::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn require_file(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("no such file: {}", path.display())))
    }
}

/// Final state as written by `run` and read by `fidelity`.
#[derive(Serialize, Deserialize)]
struct StateReport {
    circuit: String,
    engine: Engine,
    num_qubits: usize,
    policy: Option<TruncationPolicy>,
    runtime_s: f64,
    max_bond: Option<usize>,
    discarded_weight: Option<f64>,
    /// `[re, im]` pairs, qubit 0 most significant. Absent above the
    /// state-vector limit.
    amplitudes: Option<Vec<[f64; 2]>>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Runtime(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_run(
    circuit: &Path,
    engine: Engine,
    max_kept: usize,
    rel_cutoff: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    require_file(circuit)?;
    let policy =
        TruncationPolicy::new(max_kept, rel_cutoff).map_err(|e| Failure::Usage(e.to_string()))?;
    let parsed = parse_qasm_file(circuit)?;
    let run = run_engine(engine, &parsed, &policy)?;
    let amplitudes = match run.state.to_statevector() {
        Ok(sv) => Some(sv.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
        Err(mpsim::Error::Capacity { .. }) => {
            eprintln!("note: {} qubits, amplitudes omitted", parsed.num_qubits());
            None
        }
        Err(e) => return Err(e.into()),
    };
    let report = StateReport {
        circuit: circuit.display().to_string(),
        engine,
        num_qubits: parsed.num_qubits(),
        policy: (engine != Engine::Sv).then_some(policy),
        runtime_s: run.runtime_s,
        max_bond: run.state.max_bond(),
        discarded_weight: run.state.discarded_weight(),
        amplitudes,
    };
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(mpsim::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cmd_bench(
    experiment: Experiment,
    config: &str,
    out: Option<&Path>,
    summary: Option<&Path>,
) -> Result<(), Failure> {
    let cfg = if config == "defaults" {
        BenchConfig::defaults(experiment)
    } else {
        let path = Path::new(config);
        require_file(path)?;
        BenchConfig::load(experiment, path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let outcome = bench::run_experiment(&cfg)?;
    for f in &outcome.failures {
        eprintln!(
            "skipped {}{}: {}",
            f.experiment,
            f.engine.map(|e| format!(" ({e})")).unwrap_or_default(),
            f.reason
        );
    }

    let mut w = output(out)?;
    bench::write_csv(&outcome.records, &mut w)?;
    w.flush()?;

    let summary_json = match experiment {
        Experiment::Shallow => serde_json::to_value(bench::summarize_shallow(&outcome.records)),
        Experiment::QuantumVolume => serde_json::to_value(bench::summarize_qv(&outcome.records)),
        Experiment::Qasm => serde_json::to_value(bench::summarize_qasm(&outcome.records)),
    }
    .map_err(mpsim::Error::from)?;
    if let Some(path) = summary {
        let mut s = output(Some(path))?;
        serde_json::to_writer_pretty(&mut s, &summary_json).map_err(mpsim::Error::from)?;
        writeln!(s)?;
        s.flush()?;
    }
    eprintln!(
        "{}: {} records, {} skipped",
        experiment,
        outcome.records.len(),
        outcome.failures.len()
    );
    Ok(())
}

fn load_state(path: &Path) -> Result<StateVector, Failure> {
    require_file(path)?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    let report: StateReport = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: not a state report: {e}", path.display())))?;
    let amps = report
        .amplitudes
        .ok_or_else(|| Failure::Runtime(format!("{}: report has no amplitudes", path.display())))?;
    Ok(StateVector::from_amplitudes(
        amps.iter().map(|&[re, im]| C64::new(re, im)).collect(),
    )?)
}

fn cmd_fidelity(a: &Path, b: &Path) -> Result<(), Failure> {
    let (sa, sb) = (load_state(a)?, load_state(b)?);
    let f = bench::fidelity_sv(&sa, &FinalState::Sv(sb))?;
    println!("{}", serde_json::json!({ "fidelity": f }));
    Ok(())
}

fn cmd_slope(input: &Path) -> Result<(), Failure> {
    require_file(input)?;
    let file =
        File::open(input).map_err(|e| Failure::Runtime(format!("{}: {e}", input.display())))?;
    let records = read_csv(file)?;
    let mut fits = serde_json::Map::new();
    for engine in [Engine::Cf, Engine::Su] {
        match runtime_fit(&records, engine) {
            Ok(fit) => {
                fits.insert(
                    engine.to_string(),
                    serde_json::to_value(fit).map_err(mpsim::Error::from)?,
                );
            }
            Err(e) => eprintln!("{engine}: {e}"),
        }
    }
    if fits.is_empty() {
        return Err(Failure::Runtime(format!(
            "{}: not enough shallow rows for a fit",
            input.display()
        )));
    }
    println!("{}", serde_json::Value::Object(fits));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run {
            circuit,
            engine,
            max_kept,
            rel_cutoff,
            out,
        } => cmd_run(circuit, *engine, *max_kept, *rel_cutoff, out.as_deref()),
        Command::Bench {
            experiment,
            config,
            out,
            summary,
        } => cmd_bench(*experiment, config, out.as_deref(), summary.as_deref()),
        Command::Fidelity { a, b } => cmd_fidelity(a, b),
        Command::Slope { input } => cmd_slope(input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
