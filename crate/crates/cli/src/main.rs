use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use equichar::app::{self, CheckReport, RunConfig};
use equichar::{par, Error};

/// Equivariant characteristic forms and eta invariants of SKR metrics.
#[derive(Parser)]
#[command(name = "equichar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite on the configured profile.
    Check(Args),
    /// Write lform.csv.
    Lform(Args),
    /// Write transgression.csv.
    Transgression(Args),
    /// Compute the eta invariant and write all tables and report.json.
    Eta(Args),
    /// Run the finite-difference curvature oracle.
    Oracle(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON run configuration.
    config: PathBuf,
    /// Output directory (overrides output.dir in the config).
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
}

const EXIT_NUMERICAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn threads_from_env() -> Result<(), Error> {
    match std::env::var("EQUICHAR_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Config(format!("EQUICHAR_THREADS must be a positive integer, got {v:?}")))?;
            par::init_threads(n)
        }
        Err(_) => Ok(()),
    }
}

fn report_checks(r: &CheckReport, out: Option<&Path>) -> Result<bool, Error> {
    print!("{}", r.render());
    if let Some(dir) = out {
        app::write_checks(r, dir)?;
    }
    println!("{}", if r.passed { "all checks passed" } else { "some checks failed" });
    Ok(r.passed)
}

fn run(cli: Cli) -> Result<bool, Error> {
    threads_from_env()?;
    match cli.command {
        Command::Check(a) => {
            let cfg = RunConfig::from_path(&a.config)?;
            report_checks(&app::run_check(&cfg)?, a.out.as_deref())
        }
        Command::Oracle(a) => {
            let cfg = RunConfig::from_path(&a.config)?;
            report_checks(&app::run_oracle(&cfg)?, a.out.as_deref())
        }
        Command::Lform(a) => {
            let cfg = RunConfig::from_path(&a.config)?;
            let path = app::write_lform(&cfg, &app::output_dir(&cfg, a.out.as_deref()))?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Transgression(a) => {
            let cfg = RunConfig::from_path(&a.config)?;
            let path = app::write_transgression(&cfg, &app::output_dir(&cfg, a.out.as_deref()))?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Eta(a) => {
            let cfg = RunConfig::from_path(&a.config)?;
            let dir = app::output_dir(&cfg, a.out.as_deref());
            let r = app::emit_tables(&cfg, &dir)?;
            println!("eta = {} ± {:.1e}", app::fmt_num(r.eta.value), r.eta.error);
            println!("wrote lform.csv, transgression.csv, report.json to {}", dir.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERICAL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_NUMERICAL })
        }
    }
}
