use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use horotube::cli::{self, Command};

/// Run one verification command from a JSON configuration.
#[derive(Parser)]
#[command(name = "horotube", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long, required_unless_present = "list_commands")]
    config: Option<PathBuf>,
    /// Output directory (overrides OUTPUT_DIR and the configuration).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
    /// Print the valid commands and exit.
    #[arg(long)]
    list_commands: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_commands {
        for c in Command::ALL {
            println!("{c}");
        }
        return ExitCode::SUCCESS;
    }
    let path = args.config.expect("required by clap");
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match cli::validate(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let env = std::env::var("OUTPUT_DIR").ok();
    let out = cli::output_dir(args.output.as_deref(), env.as_deref(), &cfg);
    let report = cli::run(&cfg).unwrap_or_else(|e| cli::failure_report(&cfg, &e));
    if let Err(e) = report.write(&out) {
        eprintln!("cannot write {}: {e}", out.display());
        return ExitCode::from(2);
    }
    for c in &report.checks {
        println!(
            "{} {} value={:.6e} reference={:.6e}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.value,
            c.reference
        );
    }
    println!("{} -> {}", cfg.command, out.display());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
