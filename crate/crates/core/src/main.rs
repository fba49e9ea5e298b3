use std::process::ExitCode;

use clap::Parser;
use infwedge::cli::{execute, Cli};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("infwedge: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
