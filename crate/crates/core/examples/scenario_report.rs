//! Run a built-in scenario (default `gaussian-soliton`) and print its report.
//!
//! ```text
//! cargo run --example scenario_report -- hyperbolic-halfspace csv
//! ```

use qyamabe::cli::{run, RunOptions, BUILTINS};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args
        .next()
        .unwrap_or_else(|| "gaussian-soliton".to_string());
    let csv = args.next().as_deref() == Some("csv");
    match run(&format!("builtin:{name}"), &RunOptions::default()) {
        Ok(report) => {
            print!(
                "{}",
                if csv {
                    report.to_csv()
                } else {
                    report.to_json()
                }
            );
            eprintln!(
                "{} pass, {} fail, {} report-only",
                report.summary.pass, report.summary.fail, report.summary.report_only
            );
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("builtins: {}", BUILTINS.join(", "));
            std::process::exit(2);
        }
    }
}
