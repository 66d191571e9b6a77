mod config;
mod run;

use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};
use nf3::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let rows = match run::execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                Error::NonFinite(_) => EXIT_NUMERIC,
                _ => EXIT_CONFIG,
            });
        }
    };
    let written = if cfg.out == "-" {
        run::write_csv(io::stdout().lock(), &rows)
    } else {
        match File::create(&cfg.out) {
            Ok(f) => run::write_csv(BufWriter::new(f), &rows),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", cfg.out);
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    };
    if let Err(e) = written {
        eprintln!("error: writing CSV: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
