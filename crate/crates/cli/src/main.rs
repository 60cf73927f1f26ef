use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qubit_heat_cli::commands::{self, Report};
use qubit_heat_cli::config::{self, RunConfig};
use qubit_heat_cli::output::{emit, emit_extra, Cell, Format, Table};
use qubit_heat_cli::presets::Preset;
use qubit_heat_cli::{exit, validate, CliError, Result};

/// Heat transport through two coupled qubits: steady states, currents,
/// sweeps, modulator runs and figure presets.
#[derive(Debug, Parser)]
#[command(name = "qheat", version)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output file (stdout when absent); overrides [output].path
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json; overrides [output].format
    #[arg(long, global = true)]
    format: Option<Format>,
    /// worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// significant digits of numbers; overrides [output].precision
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: Option<u8>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state populations
    Steady,
    /// Steady-state heat currents of both reservoirs
    Currents,
    /// Direct/cross channel split (common reservoirs)
    Channels,
    /// 1-D or 2-D parameter sweep from the [sweep] block
    Sweep,
    /// Dark-state modulator protocol from the [modulate] block
    Modulate,
    /// Concurrence of assistance of the steady state
    Coa,
    /// Run the acceptance suite
    Validate,
    /// Emit the data table of a figure preset
    Preset {
        /// fig2a, fig2b, fig3, fig4, fig5 or fig6
        name: Preset,
    },
}

fn validation_table() -> (Table, usize) {
    let mut t = Table::new("acceptance suite", &["id", "name", "passed", "detail"]);
    let mut failed = 0;
    for f in validate::ALL {
        let c = f();
        eprintln!("{}", c.line());
        failed += usize::from(!c.passed);
        t.push(vec![Cell::Int(c.id.into()), c.name.into(), c.passed.into(), c.detail.into()]);
    }
    (t, failed)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => config::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = cli.precision {
        cfg.output.precision = p.into();
    }
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;

    let mut failed = None;
    let report: Report = pool.install(|| -> Result<Report> {
        match &cli.command {
            Command::Steady => commands::steady(&cfg),
            Command::Currents => commands::currents(&cfg),
            Command::Channels => commands::channels(&cfg),
            Command::Sweep => commands::sweep(&cfg),
            Command::Modulate => commands::modulate(&cfg),
            Command::Coa => commands::coa(&cfg),
            Command::Preset { name } => commands::run_preset(*name),
            Command::Validate => {
                let (t, f) = validation_table();
                failed = Some((f, t.rows.len()));
                Ok(t.into())
            }
        }
    })?;

    let out = &cfg.output;
    emit(&report.main, out.format, out.precision, out.path.as_deref())?;
    for (suffix, t) in &report.extras {
        let suffix = match out.format {
            Format::Csv => suffix.clone(),
            Format::Json => suffix.replace(".csv", ".json"),
        };
        emit_extra(t, out.format, out.precision, out.path.as_deref(), &suffix)?;
    }
    match failed {
        Some((f, total)) if f > 0 => Err(CliError::Validation { failed: f, total }),
        Some((_, total)) => {
            eprintln!("all {total} checks passed");
            Ok(())
        }
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
