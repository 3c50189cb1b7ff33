use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pbbddc::driver::{append_csv, check, csv_row, run, sweep, ProblemConfig, RunReport, CSV_HEADER};

/// PB-BDDC preconditioned solver for curl-curl + mass problems on a box.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Worker threads for setup and preconditioner application (0 = all).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and print its JSON report.
    Solve {
        config: PathBuf,
        /// `--key=value` overrides of the configuration file.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Solve once per value of one key and emit CSV rows.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,...`
        #[arg(long)]
        vary: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run the invariant suite.
    Check,
}

fn load(path: &Path, overrides: &[String], threads: Option<usize>) -> pbbddc::Result<ProblemConfig> {
    let mut cfg = ProblemConfig::from_file(path)?;
    cfg.apply_overrides(overrides)?;
    if let Some(t) = threads {
        cfg.threads = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_report(cfg: &ProblemConfig, report: &RunReport) -> pbbddc::Result<()> {
    let json = report.to_json()?;
    match &cfg.report {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => writeln!(std::io::stdout(), "{json}")?,
    }
    Ok(())
}

fn emit_rows(cfg: &ProblemConfig, rows: &[String]) -> pbbddc::Result<()> {
    match &cfg.csv {
        Some(p) => append_csv(Path::new(p), rows),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(out, "{r}")?;
            }
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> pbbddc::Result<bool> {
    match cli.command {
        Command::Solve { config, overrides } => {
            let cfg = load(&config, &overrides, cli.threads)?;
            let report = run(&cfg)?;
            write_report(&cfg, &report)?;
            if cfg.csv.is_some() {
                emit_rows(&cfg, &[csv_row(&cfg, &report)])?;
            }
            Ok(report.converged)
        }
        Command::Sweep { config, vary, overrides } => {
            let cfg = load(&config, &overrides, cli.threads)?;
            let (key, values) = vary
                .split_once('=')
                .ok_or_else(|| pbbddc::Error::Config(format!("--vary `{vary}` is not key=v1,v2,...")))?;
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
            let runs = sweep(&cfg, key.trim(), &values)?;
            let rows: Vec<String> = runs.iter().map(|(c, r)| csv_row(c, r)).collect();
            emit_rows(&cfg, &rows)?;
            for (c, r) in &runs {
                eprintln!("{key} = {}: {} iterations{}", c.get(key.trim()).unwrap_or_default(), r.iterations, if r.converged { "" } else { " (not converged)" });
            }
            Ok(runs.iter().all(|(_, r)| r.converged))
        }
        Command::Check => {
            let outcomes = check::run_suite()?;
            let mut out = std::io::stdout().lock();
            for o in &outcomes {
                writeln!(out, "{} {} value={:e} tol={:e}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.value, o.tolerance)?;
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
