use std::process::ExitCode;

use clap::Parser;

use bd_mimo::cli::{emit_results, run_spec, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.into_spec().and_then(|spec| {
        let records = run_spec(&spec)?;
        emit_results(&records, &spec)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bd-mimo: {e}");
            ExitCode::from(2)
        }
    }
}
