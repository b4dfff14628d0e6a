use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use groupoid_retract::cli::{run, CommandConfig};

fn main() -> ExitCode {
    let config = CommandConfig::parse();
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let (Some(path), Some(dot)) = (&config.emit_dot, &report.dot) {
        if let Err(e) = fs::write(path, dot) {
            eprintln!("error[Io]: cannot write `{}`: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    let mut out = std::io::stdout().lock();
    if out.write_all(report.render(config.output).as_bytes()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
