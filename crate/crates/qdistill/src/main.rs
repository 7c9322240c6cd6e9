use std::process::ExitCode;

use clap::Parser;
use qdistill::cli::Cli;
use qdistill::commands::{self, EXIT_INPUT, EXIT_IO};

const THREADS_VAR: &str = "QDISTILL_THREADS";

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_VAR} must be positive"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    let outcome = match commands::run(&cli, argv.into_iter().skip(1).collect()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = outcome.report.to_json();
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_IO as u8);
        }
    }
    if cli.json {
        println!("{json}");
    } else if let Some(payload) = &outcome.payload {
        print!("{payload}");
        eprintln!("{}", outcome.summary);
    } else {
        println!("{}", outcome.summary);
    }
    ExitCode::from(outcome.exit_code as u8)
}
