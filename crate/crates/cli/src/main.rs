use std::process::ExitCode;

use clap::Parser;
use swim_forge::args::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("swim-forge: {e}");
            e.into()
        }
    }
}
