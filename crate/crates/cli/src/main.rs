use std::io::Write;
use std::panic;
use std::process::ExitCode;

use bibcite_cli::{run, Cli};
use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();

    match panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(out)) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe downstream is not our failure.
            let _ = stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush());
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("bibcite: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => {
            eprintln!("bibcite: internal error (panic)");
            ExitCode::from(2)
        }
    }
}
