use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use wrapctl::{execute, Cli, Command, Style};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap uses 2 for usage errors, which here means a bad document
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(wrapctl::EXIT_WRAPPER);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    // lenient warnings would repeat once per generated document
    let level = if matches!(cli.command, Command::Diff { .. }) { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let style = Style::from_env();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match execute(cli, &mut out, style) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("{}: {e}", style.bad("error"));
            e.code
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
