//! Conjunction operators side by side: a few hand-picked inputs and the
//! response of `and(-1, ρ)` as `ρ` grows.
//!
//! ```bash
//! cargo run --example metric_values
//! ```

use stlrob::lab::{max_lift, numeric_partial};
use stlrob::semantics::{ArithmeticGeometric, Metric, NewMetric, Traditional};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let new1 = NewMetric::new(1.0)?;
    let new3 = NewMetric::new(3.0)?;
    let metrics: [&dyn Metric; 4] = [&Traditional, &ArithmeticGeometric, &new1, &new3];
    let inputs: [&[f64]; 5] = [&[-1.0, 0.0], &[1.0, 1.2], &[1.0, 10.0, 10.0, 10.0, 10.0], &[-1.0, 2.0], &[0.3, 0.3, 0.3]];

    print!("{:<28}", "operands");
    for m in &metrics {
        print!("{:>12}", m.name());
    }
    println!();
    for values in inputs {
        print!("{:<28}", format!("{values:?}"));
        for m in &metrics {
            print!("{:>12.6}", m.and_n(values)?);
        }
        println!();
    }

    println!("\nand(-1, rho):");
    for rho in [-2.0, -1.0, -0.5, 0.0, 0.5, 2.0, 10.0] {
        print!("  rho = {rho:>5}");
        for m in &metrics {
            print!("{:>12.6}", m.and_n(&[-1.0, rho])?);
        }
        println!();
    }
    for m in &metrics {
        let (lift, at) = max_lift(*m)?;
        println!("{:<10} largest rise above -1: {lift:.4} at rho = {at:.2}", m.name());
    }

    let grad = numeric_partial(&new3, &[0.4, 0.4, 0.4], 0, 1e-5)?;
    println!("\nd and / d rho_1 at three equal operands (new, nu = 3): {grad:.5}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(err) = run_example() {
        eprintln!("{err}");
        std::process::exit(1);
    }
}
