use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = pupguard::cli::Cli::parse();
    ExitCode::from(pupguard::cli::run(cli) as u8)
}
