//! Command-line entry point; see the library crate for the commands.

use std::process::ExitCode;

use clap::Parser;
use manin_dp4_cli::{run, RunConfig, Status};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match run(&cfg) {
        Ok(out) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.status.code() as u8),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(Status::Config.code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status.code() as u8)
        }
    }
}
