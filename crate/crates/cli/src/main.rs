use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = ruelle_cli::Cli::parse();
    match ruelle_cli::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
