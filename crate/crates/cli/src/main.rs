//! `expobern`: reproduction checks, convergence sweeps, point evaluation and
//! the warp-deviation table for the exponential Bernstein operators.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use config::{Command, ExperimentConfig, RawConfig};

#[derive(Parser, Debug)]
#[command(name = "expobern", version, about = "Exponential Bernstein operators on the unit hypercube")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Run the identity and inequality checks; exit 2 if any hard check fails.
    Verify(Common),
    /// Sup-grid errors, error bounds and fitted rates per corpus function.
    Converge(Common),
    /// Evaluate the operator at given points.
    Eval(EvalArgs),
    /// Maximal warp deviation gamma_n, closed form against a grid search.
    Gamma(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Exponential rate mu (0 selects the classical operators).
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<String>,
    /// Dimension d.
    #[arg(long)]
    d: Option<String>,
    /// Comma-separated, strictly increasing degrees.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated corpus function names (default: whole corpus).
    #[arg(long)]
    function: Option<String>,
    /// Grid points per axis: one value or one per axis.
    #[arg(long)]
    grid: Option<String>,
    /// classical | exponential
    #[arg(long)]
    operator: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output file (converge: output directory). Default: stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random probe points.
    #[arg(long)]
    seed: Option<String>,
    /// Fill the runtime_ms column (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Inline point, e.g. `0.3,0.7`; repeatable.
    #[arg(long)]
    point: Vec<String>,
    /// File with one point per line.
    #[arg(long)]
    points: Option<PathBuf>,
}

fn raw_config(common: &Common, extra: &[(&str, String)]) -> Result<RawConfig, String> {
    let mut raw = match &common.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let flags = [
        ("mu", common.mu.clone()),
        ("d", common.d.clone()),
        ("n", common.n.clone()),
        ("function", common.function.clone()),
        ("grid", common.grid.clone()),
        ("operator", common.operator.clone()),
        ("format", common.format.clone()),
        ("out", common.out.as_ref().map(|p| p.display().to_string())),
        ("seed", common.seed.clone()),
        ("timing", common.timing.then(|| "true".to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.set(key, &v)?;
        }
    }
    for (key, value) in extra {
        raw.set(key, value)?;
    }
    Ok(raw)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, common, extra) = match &cli.command {
        Sub::Verify(c) => (Command::Verify, c, vec![]),
        Sub::Converge(c) => (Command::Converge, c, vec![]),
        Sub::Gamma(c) => (Command::Gamma, c, vec![]),
        Sub::Eval(e) => {
            let mut extra = Vec::new();
            if !e.point.is_empty() {
                extra.push(("point", e.point.join(";")));
            }
            if let Some(p) = &e.points {
                extra.push(("points", p.display().to_string()));
            }
            (Command::Eval, &e.common, extra)
        }
    };
    let raw = raw_config(common, &extra).map_err(CliError::Config)?;
    let cfg = ExperimentConfig::resolve(&raw, command).map_err(CliError::Config)?;
    match command {
        Command::Verify => commands::verify(&cfg),
        Command::Converge => commands::converge(&cfg),
        Command::Eval => commands::eval(&cfg),
        Command::Gamma => commands::gamma(&cfg),
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Config(msg) => eprintln!("expobern: configuration error: {msg}"),
                CliError::ChecksFailed(k) => eprintln!("expobern: {k} check(s) failed"),
                CliError::Io(msg) => eprintln!("expobern: I/O error: {msg}"),
            }
            ExitCode::from(err.exit_code())
        }
    }
}
