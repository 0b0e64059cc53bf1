use std::process::ExitCode;

use clap::Parser;
use pbgsim::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(artifacts) => {
            for f in &artifacts.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pbgsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
