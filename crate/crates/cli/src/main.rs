use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use laxforge::commands::init_threads;
use laxforge::{run, Cli, CliError, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads(std::env::var("LAXFORGE_THREADS").ok())
        .and_then(|_| RunConfig::resolve(cli.command, &cli.flags))
        .and_then(|cfg| run(&cfg));
    let code = match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("{w}");
            }
            // a closed pipe is not worth a panic
            let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
            match outcome.failure {
                Some(e) => report(&e),
                None => 0,
            }
        }
        Err(e) => report(&e),
    };
    ExitCode::from(code as u8)
}

fn report(e: &CliError) -> i32 {
    eprintln!("laxforge: {e}");
    e.exit_code()
}
