use std::process::ExitCode;

use clap::Parser;
use qramsey::cli::{render_text, run, Cli, Format, RunError};
use qramsey::report::render;

fn emit(cli: &Cli, report: &serde_json::Value) -> Result<(), RunError> {
    let text = match cli.format {
        Format::Json => render(report),
        Format::Text => render_text(report),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| RunError::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run(&cli).and_then(|report| emit(&cli, &report));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(report) = e.report() {
                let _ = emit(&cli, report);
            }
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
