//! Loads a scenario from TOML with a custom funnel CSV and simulates it.
//!
//! ```bash
//! cargo run --example scenario_file
//! ```

use std::fs;

use stlrob::dynamics::{input_energy, simulate, Scenario};
use stlrob::semantics::{robustness_value, NewMetric};

const SCENARIO: &str = r#"
formula = "F[0,5](0.3 - norm(x1 - 3, x2 - 1)) & G[0,5](x2 >= 0.5)"

[robot]
x0 = [1.0, 1.0]
u_max = 0.8
dt = 0.05
horizon = 5.0

[[goals]]
center = [3.0, 1.0]
radius = 0.3
funnel = "ramp.csv"
"#;

const RAMP: &str = "t,gamma\n0,-2\n2,-1\n4,0.1\n5,0.1\n";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("stlrob-scenario-example");
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("ramp.csv"), RAMP)?;
    fs::write(dir.join("scenario.toml"), SCENARIO)?;

    let scenario = Scenario::load(dir.join("scenario.toml"))?;
    println!("formula: {}", scenario.formula);
    // No feedforward at all: the rising funnel drags the robot to the goal.
    let trace = simulate(&scenario.robot, |_, _, _| [0.0, 0.0], &scenario.guides)?;
    let last = trace.row(trace.len() - 1);
    println!("final state ({:.3}, {:.3}), energy {:.4}", last[0], last[1], input_energy(&trace)?);
    println!("robustness (new, nu = 3): {:.4}", robustness_value(&NewMetric::default(), &scenario.formula, &trace, 0.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(err) = run_example() {
        eprintln!("{err}");
        std::process::exit(1);
    }
}
