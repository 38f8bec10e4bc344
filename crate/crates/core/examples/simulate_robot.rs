//! Rolls the hand-computed optimal plan out on the two-goal robot under each
//! guidance profile and reports energy, robustness and guidance activity.
//!
//! ```bash
//! cargo run --example simulate_robot
//! ```

use stlrob::dynamics::{guidance_control, input_energy, simulate, Guidance, Scenario};
use stlrob::experiments::analytic_optimum;
use stlrob::semantics::{robustness_value, MetricKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opt = analytic_optimum();
    println!("inter-goal distance {:.4}, first leg {:.4}, optimal energy {:.5}", opt.inter_goal, opt.first_leg, opt.cost);
    let metrics = [MetricKind::Traditional, MetricKind::Ag, MetricKind::new_metric(3.0)?];

    for guidance in Guidance::ALL {
        let scenario = Scenario::case_study(guidance);
        let trace = opt.plan.simulate(&scenario)?;
        let mut active = 0;
        for k in 0..scenario.robot.steps() {
            let row = trace.row(k);
            let u = guidance_control([row[0], row[1]], trace.time(k), &scenario.guides, scenario.robot.u_max)?;
            if u != [0.0, 0.0] {
                active += 1;
            }
        }
        print!("{guidance:>6}: energy {:.5}, guidance active on {active} steps, rho", input_energy(&trace)?);
        for m in &metrics {
            print!(" {}={:.4}", m.label(), robustness_value(m, &scenario.formula, &trace, 0.0)?);
        }
        println!();
    }

    // Without a plan the strong funnel alone pulls the robot toward g1
    // early on, then toward g2.
    let scenario = Scenario::case_study(Guidance::Strong);
    let idle = simulate(&scenario.robot, |_, _, _| [0.0, 0.0], &scenario.guides)?;
    for t in [0.0, 1.0, 2.0, 3.0, 4.0] {
        let row = idle.row(idle.index_of(t)?);
        println!("guided only, t = {t}: x = ({:.3}, {:.3})", row[0], row[1]);
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
