//! Command-line front end.
//!
//! Exit codes: 0 when the task converged, certified or passed; 2 when it ran
//! to completion without that (the best certificate is still written); 1 on
//! input and engine errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::problem::{parse_problem, run_problem, Overrides, ProblemError, Task};
use crate::report::{emit_report, render, Format, ReportFile};

#[derive(Debug, Parser)]
#[command(name = "convexkit", version, about = "Selections and fixed points of set-valued maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Almost-continuous selection at accuracy epsilon
    Select(RunArgs),
    /// Continuous selection by successive approximation
    MichaelSelect(RunArgs),
    /// Fixed point of S from almost fixed points of conv(T)∘R
    Fixpoint(RunArgs),
    /// Almost fixed point of conv(T)∘R (exact for discrete structures)
    AlmostFixpoint(RunArgs),
    /// Fixed point of a map of the standard simplex
    Brouwer(RunArgs),
    /// Sampled audit of the convexity axioms
    CheckAxioms(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Report path; the report goes to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub audit_density: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Command {
    fn parts(&self) -> (Task, &RunArgs) {
        match self {
            Command::Select(a) => (Task::Select, a),
            Command::MichaelSelect(a) => (Task::MichaelSelect, a),
            Command::Fixpoint(a) => (Task::Fixpoint, a),
            Command::AlmostFixpoint(a) => (Task::AlmostFixpoint, a),
            Command::Brouwer(a) => (Task::Brouwer, a),
            Command::CheckAxioms(a) => (Task::CheckAxioms, a),
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(cmd: &Command) -> Result<i32, String> {
    let (task, args) = cmd.parts();
    let text = std::fs::read_to_string(&args.problem).map_err(|e| format!("{}: {e}", args.problem.display()))?;
    let problem = parse_problem(&text).map_err(|e| e.to_string())?;
    if problem.task != task {
        return Err(format!("task: problem file is for {}, not {}", problem.task.as_str(), task.as_str()));
    }
    if let Some(d) = args.audit_density {
        if !(d > 0.0 && d.is_finite()) {
            return Err("--audit-density: must be positive".into());
        }
    }
    let start = Instant::now();
    let out = run_problem(&problem, Overrides { seed: args.seed, audit_density: args.audit_density })
        .map_err(|e| match e {
            ProblemError::Input(m) | ProblemError::Engine(m) => m,
        })?;
    let report = ReportFile::new(&out, start.elapsed().as_secs_f64() * 1e3);
    match &args.out {
        Some(path) => emit_report(&report, &out.csv, args.format, path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{}", render(&report, &out.csv, args.format)),
    }
    eprintln!("{}: {}", task.as_str(), out.status);
    Ok(if out.success { 0 } else { 2 })
}
