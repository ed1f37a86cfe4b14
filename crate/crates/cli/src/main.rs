use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spwell_cli::{run, RunConfig};

#[derive(Parser)]
#[command(name = "spwell", version, about = "Schrödinger–Poisson steep-well solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form constants, Moser ladders and Poisson oracles.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const DEFAULT_VERIFY: &str = r#"{"mode": "verify", "params": {"p": 1.5, "lambda": 0.01, "mu": 100}}"#;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, seed, out, force_verify) = match cli.command {
        Command::Solve { config, seed, out } => (read(&config), seed, out, false),
        Command::Verify { config, seed, out } => {
            (config.map(|c| read(&c)).unwrap_or_else(|| Ok(DEFAULT_VERIFY.into())), seed, out, true)
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (mut cfg, warnings) = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if force_verify {
        cfg.mode = spwell_cli::Mode::Verify;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let dir = out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let output = run(&cfg, warnings);
    if let Err(e) = output.write(&dir) {
        eprintln!("error: writing {}: {e:#}", dir.display());
        return ExitCode::from(2);
    }
    let r = &output.report;
    let t = r.tally;
    println!(
        "{}: hard {}/{} soft {}/{} -> {}",
        r.mode,
        t.hard_pass,
        t.hard_pass + t.hard_fail,
        t.soft_pass,
        t.soft_pass + t.soft_fail,
        dir.display()
    );
    for c in r.failed_hard() {
        println!("  FAIL {}: {} vs {}", c.name, c.lhs, c.rhs);
    }
    if let Some(f) = &r.failure {
        println!("  failure: {f}");
    }
    if r.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
}
