use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use oraclekit::bench::{load_benchmarks, run_bench, write_csv};
use oraclekit::emit::{from_json, to_json, to_qasm};
use oraclekit::grover::{card_query_to_pla, run_search, CardQuery};
use oraclekit::pipeline::{synthesize, Method, PipelineError, SynthOptions};
use oraclekit::pla::{encode_integer_pairs, expand_with, parse_pla, write_pla, ExpandOptions, IntegerPairs, PlaTable};
use oraclekit::sim::{bitstring, sample_probabilities, verify_oracle, VerifyMode};
use oraclekit::tbs::{Direction, TbsError};
use oraclekit::Status;

#[derive(Parser)]
#[command(name = "oraclekit", version, about = "Synthesize verified quantum oracles from .pla tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize one table into a QASM circuit.
    Synth(SynthArgs),
    /// Run every benchmark in a directory through the chosen methods.
    Bench(BenchArgs),
    /// Check a JSON netlist against a table.
    Verify(VerifyArgs),
    /// Simulate Grover search with a synthesized oracle.
    Grover(GroverArgs),
    /// Turn integer domain/range pairs into a .pla table.
    Encode(EncodeArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    netlist: Option<PathBuf>,
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    bidirectional: bool,
    #[arg(long)]
    no_minimize: bool,
    /// Leave minterms covered by no cube unspecified.
    #[arg(long)]
    partial: bool,
    /// Assign output don't-cares to minimize duplicated patterns.
    #[arg(long)]
    dc_minimize: bool,
    #[arg(long, default_value_t = 600)]
    timeout_s: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    /// Comma-separated list of esop, esop-rtt, tbs.
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "esop,esop-rtt,tbs")]
    methods: Vec<Method>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 600)]
    timeout_s: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    bidirectional: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Minimal,
    Preserve,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    partial: bool,
}

#[derive(Args)]
struct GroverArgs {
    /// Use the six-bit playing-card encoding with --query.
    #[arg(long, requires = "query")]
    deck: bool,
    /// For example `suit=diamonds,rank=10`.
    #[arg(long, requires = "deck", conflicts_with = "pla")]
    query: Option<String>,
    /// Single-output predicate table.
    #[arg(long)]
    pla: Option<PathBuf>,
    /// `auto` or an explicit count.
    #[arg(long, default_value = "auto")]
    iterations: String,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Rows of `domain,range` integers.
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

/// Process exit status with the message to print.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_LIMIT: u8 = 4;

impl Failure {
    fn input(error: anyhow::Error) -> Self {
        Failure { code: EXIT_INPUT, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::input(error)
    }
}

fn pipeline_failure(e: PipelineError) -> Failure {
    let code = match (&e, e.status()) {
        (PipelineError::VerificationFailed(_), _) => EXIT_VERIFY,
        (_, Some(Status::Timeout)) | (PipelineError::Tbs(TbsError::GateLimitExceeded { .. }), _) => EXIT_LIMIT,
        _ => EXIT_INPUT,
    };
    Failure { code, error: e.into() }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_table(path: &Path) -> anyhow::Result<PlaTable> {
    parse_pla(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn timeout(seconds: u64) -> Option<Duration> {
    Some(Duration::from_secs(seconds))
}

fn direction(bidirectional: bool) -> Direction {
    if bidirectional {
        Direction::Bidirectional
    } else {
        Direction::Unidirectional
    }
}

fn cmd_synth(a: SynthArgs) -> Result<(), Failure> {
    let table = read_table(&a.input)?;
    let name = a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let opts = SynthOptions {
        method: a.method,
        minimize: !a.no_minimize,
        partial: a.partial,
        dc_minimize: a.dc_minimize,
        direction: direction(a.bidirectional),
        timeout: timeout(a.timeout_s),
        ..SynthOptions::default()
    };
    let s = synthesize(&table, &name, &opts).map_err(pipeline_failure)?;
    write(&a.out, &to_qasm(&s.circuit).map_err(|e| anyhow!(e))?)?;
    if let Some(path) = &a.netlist {
        write(path, &to_json(&s.circuit))?;
    }
    let report = serde_json::json!({
        "function": name,
        "method": a.method,
        "qubits": s.metrics.qubits,
        "gate_count": s.metrics.gate_count,
        "complexity": s.metrics.complexity,
        "time_us": s.metrics.time_us,
        "status": s.metrics.status,
        "embedding": s.embedding,
        "verification": s.verification.as_ref().map(|v| serde_json::json!({
            "total_minterms": v.total_minterms,
            "checked": v.checked,
            "passed": v.passed,
        })),
    });
    let text = serde_json::to_string_pretty(&report).expect("json");
    match &a.metrics {
        Some(path) => write(path, &(text + "\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    if !a.dir.is_dir() {
        return Err(Failure::input(anyhow!("{} is not a directory", a.dir.display())));
    }
    let benchmarks = load_benchmarks(&a.dir).map_err(|e| anyhow!(e))?;
    let base = SynthOptions {
        timeout: timeout(a.timeout_s),
        direction: direction(a.bidirectional),
        ..SynthOptions::default()
    };
    let report = run_bench(&benchmarks, &a.methods, &base, a.jobs);
    let mut out = Vec::new();
    write_csv(&report.rows, &mut out).context("formatting CSV")?;
    let text = String::from_utf8(out).expect("utf-8 CSV");
    match &a.csv {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    if !report.failures.is_empty() {
        for f in &report.failures {
            eprintln!("error: {f}");
        }
        return Err(Failure { code: EXIT_VERIFY, error: anyhow!("{} benchmark runs failed", report.failures.len()) });
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let table = read_table(&a.input)?;
    let spec = expand_with(&table, &ExpandOptions { partial: a.partial, ..ExpandOptions::default() })
        .context("expanding the table")?;
    let circuit = from_json(&read(&a.circuit)?).with_context(|| format!("parsing {}", a.circuit.display()))?;
    let mode = match a.mode {
        ModeArg::Minimal => VerifyMode::MinimalQubit,
        ModeArg::Preserve => VerifyMode::DomainPreserving,
    };
    let report = verify_oracle(&circuit, &spec, mode).map_err(|e| anyhow!(e))?;
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    if report.passed {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, error: anyhow!("{} minterms disagree", report.mismatches.len()) })
    }
}

fn cmd_grover(a: GroverArgs) -> Result<(), Failure> {
    let table = match (&a.query, &a.pla) {
        (Some(q), None) => {
            let query: CardQuery = q.parse().map_err(|e| anyhow!("{e}"))?;
            card_query_to_pla(&query).map_err(|e| anyhow!("{e}"))?
        }
        (None, Some(path)) => read_table(path)?,
        _ => return Err(Failure::input(anyhow!("give either --deck --query or --pla"))),
    };
    let iterations = match a.iterations.as_str() {
        "auto" => None,
        k => Some(k.parse::<usize>().map_err(|_| anyhow!("--iterations must be auto or an integer"))?),
    };
    let run = run_search(&table, iterations).map_err(|e| anyhow!("{e}"))?;
    let hist = sample_probabilities(&run.probabilities, table.n, a.shots, a.seed);
    let csv = hist.to_csv();
    match &a.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    let hits: u64 = run.marked.iter().map(|&x| hist.count(x)).sum();
    eprintln!("iterations: {}", run.plan.iterations);
    eprintln!("marked: {} of {}", run.plan.marked, 1u64 << table.n);
    eprintln!("predicted success: {:.6}", run.plan.predicted_success);
    eprintln!("statevector success: {:.6}", run.measured_success());
    eprintln!("sampled success: {hits}/{}", a.shots);
    if let Some((top, count)) = hist.top() {
        eprintln!("top outcome: {} ({count} shots)", bitstring(top, table.n));
    }
    Ok(())
}

fn cmd_encode(a: EncodeArgs) -> Result<(), Failure> {
    let text = read(&a.csv)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.context("reading CSV")?;
        let parsed: Option<(u64, u64)> = match (record.get(0), record.get(1)) {
            (Some(d), Some(r)) if record.len() == 2 => d.parse().ok().zip(r.parse().ok()),
            _ => None,
        };
        match parsed {
            Some(pair) => rows.push(pair),
            // a leading header line is allowed
            None if line == 0 => continue,
            None => return Err(Failure::input(anyhow!("line {}: expected `domain,range`", line + 1))),
        }
    }
    let table = encode_integer_pairs(&IntegerPairs::new(rows)).context("encoding pairs")?;
    write(&a.out, &write_pla(&table))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Grover(a) => cmd_grover(a),
        Command::Encode(a) => cmd_encode(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
