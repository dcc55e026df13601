//! `varns`: command-line runner for the dual-field variational laboratory.
//!
//! Exit codes: 0 when the run succeeds and its checks pass, 2 when checks
//! fail or a solver does not converge, 1 for usage and configuration errors.

mod commands;
mod config;
mod inputs;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use varns_core::field::Boundary;

use commands::Command;
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "varns", version, about = "Dual-field variational laboratory for incompressible flow")]
struct Cli {
    /// Subcommand; may instead come from the config's `command` key.
    #[arg(value_enum)]
    command: Option<Command>,

    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Print the resolved configuration with all defaults and exit.
    #[arg(long)]
    print_config: bool,

    /// Output directory (default: $VARNS_OUT, then ./varns-out).
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    nu: Option<f64>,

    /// Nodes along every axis; also the oscillator interval count.
    #[arg(long)]
    n: Option<usize>,

    #[arg(long)]
    time_nodes: Option<usize>,

    #[arg(long)]
    dt: Option<f64>,

    /// Extent of every axis.
    #[arg(long)]
    extent: Option<f64>,

    /// Boundary kind of every axis: periodic or wall.
    #[arg(long)]
    boundary: Option<String>,

    /// taylor-green, zero, cavity, random:<seed> or file:<dir>.
    #[arg(long)]
    scenario: Option<String>,

    /// trace, zero or random:<seed>.
    #[arg(long)]
    surface: Option<String>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    perturbation: Option<f64>,

    #[arg(long)]
    a: Option<f64>,

    #[arg(long)]
    b: Option<f64>,

    #[arg(long)]
    alpha: Option<f64>,

    #[arg(long)]
    beta: Option<f64>,

    /// Number of grids in the Taylor-Green refinement sweep.
    #[arg(long)]
    refine: Option<usize>,

    #[arg(long)]
    tau: Option<f64>,

    #[arg(long)]
    newton_tol: Option<f64>,

    #[arg(long)]
    max_newton: Option<usize>,

    #[arg(long)]
    continuation_steps: Option<usize>,

    #[arg(long)]
    pseudo_dt: Option<f64>,
}

impl Cli {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(cmd) = self.command {
            c.command = cmd.to_possible_value().map(|v| v.get_name().to_owned());
        }
        set(&mut c.out, self.out.clone().map(Some));
        set(&mut c.nu, self.nu);
        if let Some(n) = self.n {
            c.grid.nodes = vec![n; c.grid.dim];
            c.oscillator.intervals = n;
        }
        set(&mut c.grid.time_nodes, self.time_nodes);
        set(&mut c.grid.dt, self.dt);
        if let Some(e) = self.extent {
            c.grid.extents = vec![e; c.grid.dim];
        }
        if let Some(b) = &self.boundary {
            let kind = parse_boundary(b)?;
            c.grid.boundary = vec![kind; c.grid.dim];
        }
        set(&mut c.scenario, self.scenario.clone());
        set(&mut c.surface, self.surface.clone());
        set(&mut c.seed, self.seed);
        set(&mut c.perturbation, self.perturbation);
        set(&mut c.oscillator.a, self.a);
        set(&mut c.oscillator.b, self.b);
        set(&mut c.oscillator.alpha, self.alpha);
        set(&mut c.oscillator.beta, self.beta);
        set(&mut c.verify.refine, self.refine);
        set(&mut c.verify.tau, self.tau);
        set(&mut c.solver.newton_tol, self.newton_tol);
        set(&mut c.solver.max_newton, self.max_newton);
        set(&mut c.solver.continuation_steps, self.continuation_steps);
        set(&mut c.solver.pseudo_dt, self.pseudo_dt);
        Ok(c)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_boundary(s: &str) -> anyhow::Result<Boundary> {
    serde_json::from_value(serde_json::Value::String(s.to_owned()))
        .map_err(|_| anyhow!("unknown boundary kind {s:?}; expected periodic or wall"))
}

/// Exit code for an error: numerical failures count as failed checks,
/// everything else as a usage or configuration problem.
fn error_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<varns_core::Error>() {
        Some(varns_core::Error::Numerical(_) | varns_core::Error::Resonance { .. }) => 2,
        _ => 1,
    }
}

/// Writes a line to standard output, ignoring a closed pipe.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn execute(cli: &Cli) -> anyhow::Result<u8> {
    let config = cli.resolve()?;
    if cli.print_config {
        emit(&serde_json::to_string_pretty(&config)?);
        return Ok(0);
    }
    let command = match (cli.command, &config.command) {
        (Some(c), _) => c,
        (None, Some(name)) => Command::from_str(name, true).map_err(|e| anyhow!("config command: {e}"))?,
        (None, None) => bail!("no subcommand given; see --help"),
    };
    let out = config.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| anyhow!("creating {}: {e}", out.display()))?;
    let verdict = commands::run(command, &config, &out)?;
    emit(&serde_json::to_string(&verdict.summary)?);
    Ok(if verdict.passed { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
