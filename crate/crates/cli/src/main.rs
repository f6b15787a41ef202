mod config;
mod emit;
mod run;

use std::process::ExitCode;

use clap::Parser;

use qsdc_core::analysis::NodeBudget;

use config::Cli;

const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_FAILURE: u8 = 1;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = NodeBudget::from_env();
    let (job, output) = match cli.into_config().and_then(|c| c.resolve(budget)) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("qsdc: {e}");
            return ExitCode::from(EXIT_INVALID_CONFIG);
        }
    };
    let report = match run::execute(job, budget) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qsdc: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    if let Err(e) = emit::emit_report(&report, output.format, output.path.as_deref()) {
        eprintln!("qsdc: {e:#}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if output.path.is_some() {
        if let Some(table) = emit::summary(&report) {
            eprint!("{table}");
        }
    }
    ExitCode::from(report.exit_code())
}
