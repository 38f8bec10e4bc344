//! Parses a formula, evaluates it over a sampled trace under each metric and
//! prints the per-node breakdown.
//!
//! ```bash
//! cargo run --example evaluate_formula
//! ```

use stlrob::formula::parse_formula;
use stlrob::semantics::{eval_boolean, robustness, MetricKind};
use stlrob::trace::Trace;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // A vehicle that accelerates, overshoots the speed limit briefly and
    // settles, sampled at 10 Hz for 6 s.
    let rows: Vec<Vec<f64>> = (0..=60)
        .map(|k| {
            let t = k as f64 * 0.1;
            let speed = 12.0 * (1.0 - (-t).exp()) + 1.5 * (-(t - 2.0).powi(2)).exp();
            let gap = 30.0 - 2.0 * t;
            vec![speed, gap]
        })
        .collect();
    let trace = Trace::new(0.0, 0.1, vec!["speed".into(), "gap".into()], rows)?;

    let spec = parse_formula("G[0,3](13 >= speed & gap >= 20) & F[1,3](speed >= 10)")?;
    println!("formula: {spec}");
    println!("satisfied: {}", eval_boolean(&spec, &trace, 0.0)?);

    for metric in [MetricKind::Traditional, MetricKind::Ag, MetricKind::new_metric(3.0)?] {
        let result = robustness(&metric, &spec, &trace, 0.0)?;
        println!("\n{metric}: rho = {:.6}", result.value);
        for node in result.nodes.iter().skip(1) {
            println!("  {:>10.4}  {}{}", node.value, "  ".repeat(node.depth), node.formula);
        }
    }

    // Traces round-trip through CSV.
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    let back = Trace::read_csv(csv.as_slice())?;
    println!("\ncsv round trip: {} rows, dt = {}", back.len(), back.dt());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(err) = run_example() {
        eprintln!("{err}");
        std::process::exit(1);
    }
}
