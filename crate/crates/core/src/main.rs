use std::process::ExitCode;

use fairfold::cli::{parse_config, run};
use fairfold::Error;

fn main() -> ExitCode {
    let config = match parse_config(std::env::args_os()) {
        Ok(c) => c,
        Err(Error::Help(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let summary = match run(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    for b in summary.report.best_cells() {
        println!(
            "{} [{}] best: {} + {} AUC {:.3}",
            b.dataset,
            b.protocol.label(),
            b.classifier.label(),
            b.resampler.label(),
            b.auc
        );
    }
    println!(
        "wrote {} files to {}",
        summary.artifacts.len(),
        config.out_dir.display()
    );
    let skipped: Vec<_> = summary.report.skipped().collect();
    if skipped.is_empty() {
        return ExitCode::SUCCESS;
    }
    eprintln!("{} cell(s) skipped:", skipped.len());
    for c in skipped {
        eprintln!(
            "  {} {} {} {}: {}",
            c.dataset,
            c.resampler.label(),
            c.classifier.label(),
            c.protocol.name(),
            c.skipped.as_deref().unwrap_or("")
        );
    }
    ExitCode::from(3)
}
