//! A miniature metric × guidance sweep with exported convergence bands.
//!
//! ```bash
//! cargo run --release --example case_study
//! ```

use stlrob::dynamics::Guidance;
use stlrob::experiments::{export_curves, run_casestudy, ExperimentPlan};
use stlrob::semantics::MetricKind;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut plan = ExperimentPlan::new(
        vec![MetricKind::Traditional, MetricKind::Ag],
        vec![Guidance::Weak, Guidance::Strong],
        vec![0, 1],
    );
    plan.pi2.iterations = 150;
    let summary = run_casestudy(&plan)?;
    print!("{}", summary.format_table());
    for c in &summary.configs {
        for r in &c.runs {
            println!(
                "{} {} seed {}: rho {:.4}, C {:.4}, first success {:?}",
                c.metric, c.guidance, r.seed, r.final_rho, r.final_cost, r.first_success
            );
        }
    }
    let dir = std::env::temp_dir().join("stlrob-case-study-example");
    for path in export_curves(&summary, &dir)? {
        println!("wrote {}", path.display());
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
