//! Reproduces the property summary table for the three built-in metrics.
//!
//! ```bash
//! cargo run --release --example property_lab
//! ```

use stlrob::lab::{format_table, run_all_checks, LabConfig};
use stlrob::semantics::{ArithmeticGeometric, Metric, NewMetric, Traditional};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = LabConfig::default();
    let new1 = NewMetric::new(1.0)?;
    let new3 = NewMetric::new(3.0)?;
    let metrics: [&dyn Metric; 4] = [&Traditional, &ArithmeticGeometric, &new1, &new3];
    let mut reports = Vec::new();
    for metric in metrics {
        reports.extend(run_all_checks(metric, &config)?);
    }
    print!("{}", format_table(&reports));
    for r in reports.iter().filter(|r| !r.passed) {
        println!("{} {}: violation {:.3e} at {:?} ({})", r.metric, r.property, r.max_violation, r.witness, r.detail);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(err) = run_example() {
        eprintln!("{err}");
        std::process::exit(1);
    }
}
