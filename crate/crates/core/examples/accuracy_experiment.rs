// Ten seeded runs per estimator with MAPE and a JSON/CSV report.

use std::error::Error;
use std::io;

use temporal_butterfly::bench::{export_report, run_experiment, ExperimentOptions, ReportFormat};
use temporal_butterfly::graph::{generate_synthetic, Layer};
use temporal_butterfly::sampling::Method;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let graph = generate_synthetic(8, 8, 1_000, 10_000, 5)?;
    let methods = [
        Method::Es { p: 0.3 },
        Method::Ns { p: 0.3, layer: Layer::Lower },
        Method::Is { s: 50, c: 1.0 },
    ];
    let options = ExperimentOptions { runs: 10, base_seed: 100, ..ExperimentOptions::default() };
    let reports = run_experiment(&graph, 500, &methods, &options)?;
    for report in &reports {
        println!(
            "{}: MAPE {:.2}%",
            report.config.method.name(),
            report.aggregates.mape.unwrap_or(f64::NAN) * 100.0
        );
    }
    export_report(&reports[0], ReportFormat::Csv, io::stdout().lock())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
