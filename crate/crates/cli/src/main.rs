use std::process::ExitCode;

use beurling_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().collect();
    // `beurling verify <command>` is accepted as a synonym of `beurling <command>`.
    if args.get(1).map(String::as_str) == Some("verify") {
        args.remove(1);
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
