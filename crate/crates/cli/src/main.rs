//! Scenario runner for the symmetric multi-marginal transport toolkit.
//!
//! Every pipeline is a subcommand driven by a JSON scenario config; reports
//! are machine readable and byte-identical across runs with the same seed.
//!
//! Exit codes: 0 all expected checks pass, 1 a check failed, 2 input error.

mod commands;
mod formats;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

const COMMANDS: &[&str] = &[
    "solve-mm",
    "solve-sym",
    "assign",
    "wasserstein",
    "involution-search",
    "polar-brenier",
    "polar-hamiltonian",
    "check-monotone",
    "check-cyclic",
    "fitzpatrick",
    "legendre",
    "reduction-check",
    "barycenter",
    "suite",
];

#[derive(Parser)]
#[command(
    name = "symot",
    version,
    about = "Discrete symmetric multi-marginal optimal transport toolkit"
)]
struct Cli {
    /// One of: solve-mm, solve-sym, assign, wasserstein, involution-search,
    /// polar-brenier, polar-hamiltonian, check-monotone, check-cyclic,
    /// fitzpatrick, legendre, reduction-check, barycenter, suite.
    command: String,

    /// Scenario config file (or scenario directory for `suite`).
    #[arg(long)]
    config: PathBuf,

    /// Directory receiving reports and artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Worker threads for `suite`.
    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// Report tolerance override.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !COMMANDS.contains(&cli.command.as_str()) {
        eprintln!(
            "error: unknown command {:?}; expected one of {}",
            cli.command,
            COMMANDS.join(", ")
        );
        return ExitCode::from(2);
    }

    if cli.command == "suite" {
        return match scenario::run_suite(&cli.config, &cli.out, cli.workers, cli.tol) {
            Ok(summary) => {
                println!(
                    "suite: {} scenarios, {} passed, {} failed",
                    summary.scenarios, summary.passed, summary.failed
                );
                for name in &summary.failures {
                    println!("failed: {name}");
                }
                if summary.failed == 0 {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        };
    }

    match commands::run_scenario_file(&cli.config, &cli.out, cli.tol) {
        Ok(report) => {
            if report.command != cli.command {
                eprintln!(
                    "error: config declares command {:?} but {:?} was invoked",
                    report.command, cli.command
                );
                return ExitCode::from(2);
            }
            println!(
                "{}: {}",
                report.name,
                if report.passed { "pass" } else { "fail" }
            );
            for (check, ok) in &report.checks {
                println!("  {check}: {}", if *ok { "ok" } else { "FAIL" });
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
