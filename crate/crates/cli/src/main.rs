use std::path::{Path, PathBuf};
use std::process::ExitCode;

use casimir_cli::config::{parse_config, Command, Format};
use casimir_cli::{render, run, write_output, CliError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "casimir-friction", version, about = "Thermal Casimir friction in reduced units (hbar = kB = 1)")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Two particles at separation r.
    Pair(RunArgs),
    /// A particle above a dilute half-space.
    ParticlePlane(RunArgs),
    /// Two dilute half-spaces, force per unit area.
    Slabs(RunArgs),
    /// Run every built-in numerical cross-check.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file (default: the config's output.path, else stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format, overriding the config.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Relative quadrature tolerance, overriding the config.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn execute(command: Command, args: &RunArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let mut cfg = parse_config(&text, command, base)?;
    if let Some(t) = args.tolerance {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(CliError::Config(format!("--tolerance: must lie in (0, 1), got {t}")));
        }
        cfg.tolerance = t;
    }
    let format = args.format.unwrap_or(cfg.format);
    let output = args
        .output
        .clone()
        .or_else(|| cfg.output.as_ref().map(|p| base.join(p)));
    let rows = run(&cfg);
    write_output(&render(&cfg, &rows, format)?, output.as_deref())?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} of {} grid points failed", rows.len())));
    }
    Ok(())
}

fn verify() -> Result<(), CliError> {
    let outcomes = casimir_core::oracles::run_all();
    for o in &outcomes {
        println!(
            "{} {:<28} discrepancy {:.3e} (bound {:.1e}) {}",
            if o.passed() { "PASS" } else { "FAIL" },
            o.name,
            o.discrepancy,
            o.bound,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} of {} checks failed", outcomes.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("casimir-friction: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Cmd::Pair(a) => execute(Command::Pair, a),
        Cmd::ParticlePlane(a) => execute(Command::ParticlePlane, a),
        Cmd::Slabs(a) => execute(Command::Slabs, a),
        Cmd::Verify => verify(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("casimir-friction: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
