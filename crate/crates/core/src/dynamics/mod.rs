//! Single-integrator robot, goal regions and funnel guidance.
//!
//! The robot follows `ẋ = u` with `‖u‖ ≤ u_max`, integrated with explicit
//! Euler steps. During exploration a feedback term pushes the robot toward
//! goals whose robustness falls below a time-varying funnel `γ(t)`; the
//! learned feedforward is added on top and the sum is saturated.

mod funnel;
mod scenario;

use thiserror::Error;

use crate::formula::{FormulaError, PredicateExpr};
use crate::trace::{Trace, TraceError};

pub use funnel::{Funnel, Guidance};
pub use scenario::{GoalConfig, RobotConfig, Scenario, ScenarioFile};

/// Gain of the guidance law.
pub const KAPPA: f64 = 2.0;
/// Margin above the funnel at which guidance switches off.
pub const DELTA: f64 = 0.05;

/// Channel names of simulated traces.
pub const CHANNELS: [&str; 4] = ["x1", "x2", "u1", "u2"];

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid robot spec: {0}")]
    Spec(String),
    #[error("goal radius must be positive, got {0}")]
    Radius(f64),
    #[error("invalid funnel: {0}")]
    Funnel(String),
    #[error("time {t} outside the funnel span [{start}, {end}]")]
    OutsideFunnel { t: f64, start: f64, end: f64 },
    #[error("state became non-finite at step {step}")]
    Diverged { step: usize },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotSpec {
    pub x0: [f64; 2],
    pub u_max: f64,
    pub dt: f64,
    pub horizon: f64,
}

impl RobotSpec {
    pub fn new(x0: [f64; 2], u_max: f64, dt: f64, horizon: f64) -> Result<Self, DynamicsError> {
        if !x0.iter().all(|v| v.is_finite()) {
            return Err(DynamicsError::Spec("initial state must be finite".into()));
        }
        if !(u_max > 0.0 && u_max.is_finite()) {
            return Err(DynamicsError::Spec(format!("u_max must be positive, got {u_max}")));
        }
        if !(dt > 0.0 && horizon > 0.0 && horizon.is_finite()) {
            return Err(DynamicsError::Spec("dt and horizon must be positive".into()));
        }
        let steps = horizon / dt;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(DynamicsError::Spec(format!("horizon {horizon} is not a multiple of dt {dt}")));
        }
        Ok(RobotSpec { x0, u_max, dt, horizon })
    }

    /// The case-study robot: start at (2, 2), unit speed limit, 10 s at 0.02 s.
    pub fn case_study() -> Self {
        RobotSpec { x0: [2.0, 2.0], u_max: 1.0, dt: 0.02, horizon: 10.0 }
    }

    /// Number of control steps, `T / dt`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// Disc-shaped goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalRegion {
    pub center: [f64; 2],
    pub radius: f64,
}

impl GoalRegion {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Self, DynamicsError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DynamicsError::Radius(radius));
        }
        Ok(GoalRegion { center, radius })
    }

    /// `r - ‖x - c‖`.
    pub fn robustness(&self, x: [f64; 2]) -> f64 {
        self.radius - distance(x, self.center)
    }

    /// The same quantity as a predicate over channels `x1`, `x2`.
    pub fn predicate(&self) -> PredicateExpr {
        PredicateExpr::ball(&CHANNELS[..2], &self.center, self.radius)
    }
}

/// A funnel attached to the goal whose robustness it bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Guide {
    pub funnel: Funnel,
    pub goal: GoalRegion,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Scales `u` down to norm `u_max` if it is longer.
pub fn saturate(u: [f64; 2], u_max: f64) -> [f64; 2] {
    let n = u[0].hypot(u[1]);
    if n > u_max {
        [u[0] * u_max / n, u[1] * u_max / n]
    } else {
        u
    }
}

/// `sat(Σ κ·max(0, γ_i(t) + δ - ρ_i(x))·g_i)`, with `g_i` the unit vector
/// from `x` toward goal `i` (zero at the centre).
pub fn guidance_control(x: [f64; 2], t: f64, guides: &[Guide], u_max: f64) -> Result<[f64; 2], DynamicsError> {
    let mut u = [0.0, 0.0];
    for guide in guides {
        let shortfall = guide.funnel.eval(t)? + DELTA - guide.goal.robustness(x);
        if shortfall <= 0.0 {
            continue;
        }
        let d = distance(x, guide.goal.center);
        if d == 0.0 {
            continue;
        }
        let gain = KAPPA * shortfall / d;
        u[0] += gain * (guide.goal.center[0] - x[0]);
        u[1] += gain * (guide.goal.center[1] - x[1]);
    }
    Ok(saturate(u, u_max))
}

/// Euler rollout of `x_{k+1} = x_k + dt·sat(û(x_k, t_k) + k(k, t_k, x_k))`.
///
/// `feedforward` receives the step index, the time and the state. The trace
/// has `T/dt + 1` rows; row `k` holds `x_k` and the input applied on
/// `[t_k, t_{k+1})`, and the last row's input is zero.
pub fn simulate<F>(spec: &RobotSpec, mut feedforward: F, guides: &[Guide]) -> Result<Trace, DynamicsError>
where
    F: FnMut(usize, f64, [f64; 2]) -> [f64; 2],
{
    let steps = spec.steps();
    let mut data = Vec::with_capacity(4 * (steps + 1));
    let mut x = spec.x0;
    for k in 0..steps {
        let t = k as f64 * spec.dt;
        let guide = guidance_control(x, t, guides, spec.u_max)?;
        let ff = feedforward(k, t, x);
        let u = saturate([guide[0] + ff[0], guide[1] + ff[1]], spec.u_max);
        if !(u[0].is_finite() && u[1].is_finite()) {
            return Err(DynamicsError::Diverged { step: k });
        }
        data.extend_from_slice(&[x[0], x[1], u[0], u[1]]);
        x = [x[0] + spec.dt * u[0], x[1] + spec.dt * u[1]];
    }
    data.extend_from_slice(&[x[0], x[1], 0.0, 0.0]);
    let channels = CHANNELS.iter().map(|c| c.to_string()).collect();
    Ok(Trace::from_flat(0.0, spec.dt, channels, data)?)
}

/// `Σ ‖u_k‖²·dt` over every row but the last.
pub fn input_energy(trace: &Trace) -> Result<f64, DynamicsError> {
    let u1 = trace.column("u1")?;
    let u2 = trace.column("u2")?;
    let n = trace.len().saturating_sub(1);
    Ok((0..n).map(|k| u1[k] * u1[k] + u2[k] * u2[k]).sum::<f64>() * trace.dt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn goal(c: [f64; 2]) -> GoalRegion {
        GoalRegion::new(c, 0.2).unwrap()
    }

    #[test]
    fn guidance_examples() {
        let none = Guidance::None.funnel();
        let guides = [
            Guide { funnel: none.clone(), goal: goal([1.5, 2.5]) },
            Guide { funnel: none.mirror(), goal: goal([2.5, 1.5]) },
        ];
        assert_eq!(guidance_control([2.0, 2.0], 3.0, &guides, 1.0).unwrap(), [0.0, 0.0]);

        // ρ = 0.2 - √0.5; pick γ so that γ + δ - ρ = 0.3.
        let rho = 0.2 - 0.5f64.sqrt();
        let gamma = 0.3 + rho - DELTA;
        let single = [Guide { funnel: Funnel::constant(gamma, 0.0, 10.0).unwrap(), goal: goal([1.5, 2.5]) }];
        let u = guidance_control([2.0, 2.0], 1.0, &single, 1.0).unwrap();
        let s = 0.6 / 2f64.sqrt();
        assert!((u[0] + s).abs() < 1e-12 && (u[1] - s).abs() < 1e-12, "{u:?}");

        let centred = [Guide { funnel: Funnel::constant(0.0, 0.0, 10.0).unwrap(), goal: goal([2.0, 2.0]) }];
        assert_eq!(guidance_control([2.0, 2.0], 0.0, &centred, 1.0).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn simulate_examples() {
        let spec = RobotSpec::case_study();
        let trace = simulate(&spec, |_, _, _| [0.0, 0.0], &[]).unwrap();
        assert_eq!(trace.len(), 501);
        assert!(trace.column("x1").unwrap().iter().all(|v| *v == 2.0));
        assert_eq!(input_energy(&trace).unwrap(), 0.0);

        let trace = simulate(&spec, |_, _, _| [1.0, 0.0], &[]).unwrap();
        let x1 = trace.column("x1").unwrap();
        assert!((x1[500] - 12.0).abs() < 1e-9);
        assert!((x1[50] - 3.0).abs() < 1e-12);
        assert!((input_energy(&trace).unwrap() - 10.0).abs() < 1e-9);

        let trace = simulate(&spec, |_, _, _| [3.0, 4.0], &[]).unwrap();
        assert!((trace.value(0, 2) - 0.6).abs() < 1e-15 && (trace.value(0, 3) - 0.8).abs() < 1e-15);

        let err = simulate(&spec, |_, _, _| [f64::NAN, 0.0], &[]).unwrap_err();
        assert!(matches!(err, DynamicsError::Diverged { step: 0 }));
    }

    #[test]
    fn spec_validation() {
        assert!(RobotSpec::new([0.0, 0.0], 0.0, 0.1, 1.0).is_err());
        assert!(RobotSpec::new([0.0, 0.0], 1.0, 0.03, 1.0).is_err());
        assert_eq!(RobotSpec::new([0.0, 0.0], 1.0, 0.02, 10.0).unwrap().steps(), 500);
        assert!(GoalRegion::new([0.0, 0.0], -1.0).is_err());
    }
}
