//! `jt`: parameter sweeps, figure datasets, bifurcation tables and self-checks.
//!
//! Data goes to standard output (or `--out`); diagnostics go to standard error.
//! Exit codes: 0 clean, 1 usage error, 2 convergence flags present, 3 verification failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use jahn_teller::sweep::{self, Cell, Grid, Model, SweepSpec, Table, Variable};
use jahn_teller::{par, verify, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_FLAGGED: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Significant digits in emitted numbers.
const SIG_DIGITS: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "jt", version, about = "Entanglement sweeps for the E⊗β and E⊗ε Jahn-Teller models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one parameter and emit qubit entropies and energies.
    Sweep(SweepArgs),
    /// Emit the dataset behind a named figure.
    Figure(FigureArgs),
    /// Classical fixed-point branches and the bifurcation threshold.
    Bifurcation(BifurcationArgs),
    /// Run a self-check suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: number of cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    min: f64,
    #[arg(long)]
    max: f64,
    #[arg(long)]
    count: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Swept variable; a coupling grid is in units of ω.
    #[arg(long = "sweep", value_enum)]
    variable: VariableArg,
    #[command(flatten)]
    grid: GridArgs,
    /// Coupling L when it is not swept.
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Starting Fock truncation (grown until converged).
    #[arg(long)]
    fock: Option<usize>,
    /// Skip exact diagonalization (E⊗ε ansatz columns only).
    #[arg(long)]
    ansatz_only: bool,
    /// Add the entanglement-gap column (E⊗ε, Δ=0).
    #[arg(long)]
    gap: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// One of qbosc, entsosc, cir, compeval, compent, conc, withd.
    name: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BifurcationArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.0)]
    min: f64,
    #[arg(long, default_value_t = 3.0)]
    max: f64,
    #[arg(long, default_value_t = 31)]
    count: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of conservation, degeneracy, basis-equivalence, ansatz-integrals.
    suite: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Eb,
    Ee,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Eb => Model::Eb,
            ModelArg::Ee => Model::Ee,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariableArg {
    Coupling,
    C1,
    Gamma,
    Delta,
}

impl From<VariableArg> for Variable {
    fn from(v: VariableArg) -> Self {
        match v {
            VariableArg::Coupling => Variable::Coupling,
            VariableArg::C1 => Variable::C1,
            VariableArg::Gamma => Variable::Gamma,
            VariableArg::Delta => Variable::Delta,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::UnknownSuite(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Rounds to [`SIG_DIGITS`] significant digits.
fn round_sig(v: f64) -> f64 {
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

fn format_number(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(v);
    if r == 0.0 {
        "0".into()
    } else if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Flag(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(v) if v.is_finite() => json!(round_sig(*v)),
        Cell::Num(_) => Value::Null,
        Cell::Int(v) => json!(v),
        Cell::Flag(b) => json!(b),
        Cell::Text(s) => json!(s),
    }
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_table(table: &Table, spec: Value, output: &OutputArgs) -> Result<(), Failure> {
    let mut sink = open_output(&output.out)?;
    match output.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Necessary).from_writer(&mut sink);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(format_cell))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        table.columns.iter().cloned().zip(row.iter().map(json_cell)).collect();
                    Value::Object(obj)
                })
                .collect();
            let metadata: Map<String, Value> = table.metadata.iter().map(|(k, v)| (k.clone(), json_cell(v))).collect();
            let doc = json!({ "spec": spec, "metadata": metadata, "rows": rows });
            serde_json::to_writer_pretty(&mut sink, &doc)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    for (k, v) in &table.metadata {
        eprintln!("jt: {k} = {}", format_cell(v));
    }
    Ok(())
}

/// Cap on truncation growth from `JT_FOCK_MAX`.
fn fock_max_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("JT_FOCK_MAX") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Failure::Usage(format!("JT_FOCK_MAX must be a positive integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

fn finish_table(table: &Table) -> u8 {
    let flagged = table.flagged();
    eprintln!("jt: {} rows, {flagged} flagged as not converged", table.rows.len());
    if flagged > 0 {
        EXIT_FLAGGED
    } else {
        0
    }
}

fn run_sweep(args: SweepArgs) -> Result<u8, Failure> {
    let mut spec =
        SweepSpec::new(args.model.into(), args.variable.into(), Grid::new(args.grid.min, args.grid.max, args.grid.count)?);
    spec.coupling = args.coupling;
    spec.delta = args.delta;
    spec.omega = args.omega;
    spec.c1 = args.c1;
    spec.gamma = args.gamma;
    spec.fock = args.fock;
    spec.fock_max = fock_max_from_env()?;
    spec.exact = !args.ansatz_only;
    spec.gap = args.gap;
    spec.validate()?;
    let table = par::with_threads(args.output.threads, || sweep::sweep(&spec))?;
    write_table(&table, serde_json::to_value(&spec)?, &args.output)?;
    Ok(finish_table(&table))
}

fn run_figure(args: FigureArgs) -> Result<u8, Failure> {
    let fock_max = fock_max_from_env()?;
    let table = par::with_threads(args.output.threads, || sweep::figure(&args.name, fock_max))?;
    write_table(&table, json!({ "figure": args.name, "fock_max": fock_max }), &args.output)?;
    Ok(finish_table(&table))
}

fn run_bifurcation(args: BifurcationArgs) -> Result<u8, Failure> {
    let grid = Grid::new(args.min, args.max, args.count)?;
    let model: Model = args.model.into();
    let table = par::with_threads(args.output.threads, || sweep::bifurcation(model, args.omega, args.delta, &grid))?;
    let spec = json!({ "model": model, "omega": args.omega, "delta": args.delta, "grid": grid });
    write_table(&table, spec, &args.output)?;
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let report = verify::run(&args.suite)?;
    let mut sink = open_output(&args.out)?;
    serde_json::to_writer_pretty(&mut sink, &report)?;
    writeln!(sink)?;
    sink.flush()?;
    for c in &report.checks {
        eprintln!("jt: [{}] {} = {:.3e} (bound {:.1e})", if c.passed { "pass" } else { "FAIL" }, c.name, c.value, c.bound);
    }
    Ok(if report.passed { 0 } else { EXIT_VERIFY })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => run_sweep(a),
        Command::Figure(a) => run_figure(a),
        Command::Bifurcation(a) => run_bifurcation(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("jt: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("jt: error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_significant_digits() {
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(1.234567890123456e-9), "1.23456789012e-9");
        assert_eq!(format_number(f64::NAN), "");
    }

    #[test]
    fn cells_format_by_kind() {
        assert_eq!(format_cell(&Cell::Flag(true)), "true");
        assert_eq!(format_cell(&Cell::Int(40)), "40");
        assert_eq!(json_cell(&Cell::Num(f64::NAN)), Value::Null);
    }
}
