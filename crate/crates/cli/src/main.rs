use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use polarcover_core::workbench::{run, Command, Config, Verdict};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Bounds,
    Pipeline,
    Witness,
    Param,
    Selftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Bounds => Command::Bounds,
            Cmd::Pipeline => Command::Pipeline,
            Cmd::Witness => Command::Witness,
            Cmd::Param => Command::Param,
            Cmd::Selftest => Command::Selftest,
        }
    }
}

/// Polars, contact lines and double covers over exact fields.
#[derive(Debug, Parser)]
#[command(name = "polarcover", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Writes the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

const EXIT_CONFIG: u8 = 2;

fn load(cli: &Cli) -> anyhow::Result<Config> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let mut cfg = Config::parse(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("polarcover: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match run(cli.command.into(), &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("polarcover: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let json = report.to_json();
    match &cli.json {
        Some(path) => {
            if let Err(e) = fs::write(path, json + "\n") {
                eprintln!("polarcover: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG);
            }
            let verdict = if report.verdict == Verdict::Pass { "PASS" } else { "FAIL" };
            eprintln!("{}: {verdict}", report.command);
        }
        None => println!("{json}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
