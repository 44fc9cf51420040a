use std::process::ExitCode;

use clap::Parser;
use perverse_cli::commands::{run, Cli, EXIT_BAD_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_BAD_INPUT),
            };
        }
    };
    ExitCode::from(run(cli))
}
