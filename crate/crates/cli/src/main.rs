use std::process::ExitCode;

use clap::Parser;
use mlradon_cli::{run, Cli, CliError};

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("MLRADON_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("MLRADON_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("MLRADON_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    match run(&cli.command) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(CliError::VerifyFailed(report)) => {
            print!("{report}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
