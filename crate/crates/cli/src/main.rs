use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = nfl_cli::Cli::parse();
    match nfl_cli::run(cli) {
        Ok(stdout) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(stdout.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
