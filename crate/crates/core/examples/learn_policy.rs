//! A short guided PI² run on the two-goal task with the classical metric.
//!
//! ```bash
//! cargo run --release --example learn_policy
//! ```

use stlrob::dynamics::{Guidance, Scenario};
use stlrob::experiments::case_study_config;
use stlrob::pi2::run_pi2;
use stlrob::semantics::Traditional;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::case_study(Guidance::Strong);
    let mut config = case_study_config(7);
    config.iterations = 300;
    let history = run_pi2(&config, &scenario, &Traditional, &scenario.formula)?;
    for r in history.records.iter().filter(|r| r.iteration % 50 == 0 || r.iteration == 1) {
        println!("k = {:>4}: rho = {:>8.4}, C = {:.4}, J = {:.4}", r.iteration, r.rho, r.cost, r.penalized);
    }
    match history.first_success() {
        Some(k) => println!("task first satisfied at iteration {k}"),
        None => println!("task not satisfied within {} iterations", config.iterations),
    }
    let mut csv = Vec::new();
    history.write_csv(&mut csv)?;
    println!("history csv: {} bytes", csv.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(err) = run_example() {
        eprintln!("{err}");
        std::process::exit(1);
    }
}
