use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use polymerlab::experiment::{self, ExperimentConfig, Report, RunOptions};
use polymerlab::partition::Beta;
use polymerlab::Error;

/// Run directed-polymer experiments from TOML configs.
///
/// Exit status: 0 when every asserted check passes, 1 when a check fails,
/// 2 for an invalid config, 3 when a size guard trips, 4 on i/o errors,
/// 5 for any other runtime error.
#[derive(Parser)]
#[command(name = "polymerlab", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the inverse temperature of every config (a number or `inf`).
    #[arg(long, global = true, value_parser = parse_beta)]
    beta: Option<Beta>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run every experiment listed in a manifest.
    Suite { manifest: PathBuf },
}

fn parse_beta(s: &str) -> Result<Beta, String> {
    Beta::from_str(s).map_err(|e| e.to_string())
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::Guard(_) | Error::Size { .. } => 3,
        Error::Io { .. } => 4,
        _ => 5,
    }
}

fn print_report(r: &Report) {
    let status = if r.pass { "PASS" } else { "FAIL" };
    println!("{status} {} ({:.1} s)", r.name, r.seconds);
    for c in &r.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        let rel = match c.relation {
            experiment::Relation::AtMost => "<=",
            experiment::Relation::AtLeast => ">=",
        };
        println!("  {mark} {}: {:.6e} {rel} {:.6e}", c.name, c.measured, c.tolerance);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        out: cli.out,
        workers: cli.workers,
        beta: cli.beta,
    };
    let result = match &cli.command {
        Command::Run { config } => ExperimentConfig::from_file(config)
            .and_then(|c| experiment::run(&c, &opts))
            .map(|r| {
                print_report(&r);
                r.pass
            }),
        Command::Suite { manifest } => experiment::load_manifest(manifest)
            .and_then(|cs| experiment::suite(&cs, &opts))
            .map(|s| {
                for item in &s.items {
                    match (&item.report, &item.error) {
                        (Some(r), _) => print_report(r),
                        (None, Some(e)) => println!("FAIL {}: {e}", item.name),
                        (None, None) => println!("FAIL {}", item.name),
                    }
                }
                let passed = s.items.iter().filter(|i| i.pass).count();
                println!("{passed}/{} passed in {:.1} s", s.items.len(), s.seconds);
                s.pass
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
