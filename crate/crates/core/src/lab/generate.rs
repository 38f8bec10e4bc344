//! Random formulas and smooth traces for sampling-based checks.

use rand::Rng;

use crate::formula::{Formula, Interval, PredicateExpr};
use crate::trace::Trace;

/// Channels used by the generated traces.
pub const CHANNELS: [&str; 2] = ["x", "y"];

/// Time step of the generated traces.
pub const DT: f64 = 0.1;

fn random_interval<R: Rng + ?Sized>(rng: &mut R, max_steps: u32) -> Interval {
    let a = rng.random_range(0..=max_steps / 2);
    let b = rng.random_range(a..=max_steps);
    Interval::new(a as f64 * DT, b as f64 * DT).expect("ordered non-negative bounds")
}

fn random_channel<R: Rng + ?Sized>(rng: &mut R) -> PredicateExpr {
    PredicateExpr::channel(CHANNELS[rng.random_range(0..CHANNELS.len())])
}

/// A random predicate in one of three shapes: `c·x - b`, `x - y + b`
/// or a disc `r - norm(x - cx, y - cy)`.
pub fn random_predicate<R: Rng + ?Sized>(rng: &mut R) -> PredicateExpr {
    let b = rng.random_range(-1.0..1.0);
    match rng.random_range(0..3) {
        0 => {
            let c = rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            PredicateExpr::sub(PredicateExpr::scale(c, random_channel(rng)), PredicateExpr::Const(b))
        }
        1 => PredicateExpr::add(
            PredicateExpr::sub(PredicateExpr::channel("x"), PredicateExpr::channel("y")),
            PredicateExpr::Const(b),
        ),
        _ => {
            let center = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            PredicateExpr::ball(&CHANNELS, &center, rng.random_range(0.3..1.5))
        }
    }
}

/// A random formula with at most `depth` operator levels above its
/// predicates. Temporal intervals use at most `max_steps` samples of [`DT`].
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, depth: usize, max_steps: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.2) {
        return Formula::predicate(random_predicate(rng));
    }
    let sub = |rng: &mut R| random_formula(rng, depth - 1, max_steps);
    match rng.random_range(0..6) {
        0 => {
            let n = rng.random_range(2..=3);
            Formula::and((0..n).map(|_| sub(rng)).collect())
        }
        1 => {
            let n = rng.random_range(2..=3);
            Formula::or((0..n).map(|_| sub(rng)).collect())
        }
        2 => Formula::not(sub(rng)),
        3 => Formula::eventually(random_interval(rng, max_steps), sub(rng)),
        4 => Formula::always(random_interval(rng, max_steps), sub(rng)),
        _ => {
            let interval = random_interval(rng, max_steps);
            let lhs = sub(rng);
            Formula::until(interval, lhs, sub(rng))
        }
    }
}

/// A trace of `len` samples at [`DT`] whose channels are sums of three
/// random sinusoids.
pub fn random_trace<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Trace {
    let waves: Vec<Vec<(f64, f64, f64)>> = CHANNELS
        .iter()
        .map(|_| {
            (0..3)
                .map(|_| {
                    (rng.random_range(0.1..1.0), rng.random_range(0.2..3.0), rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect()
        })
        .collect();
    let rows = (0..len)
        .map(|k| {
            let t = k as f64 * DT;
            waves
                .iter()
                .map(|w| w.iter().map(|(amp, freq, phase)| amp * (freq * t + phase).sin()).sum())
                .collect()
        })
        .collect();
    Trace::new(0.0, DT, CHANNELS.iter().map(|c| c.to_string()).collect(), rows)
        .expect("generated trace is well formed")
}

/// A random formula of depth at most 4 and a trace covering its horizon
/// with some slack, at most 200 samples long.
pub fn random_case<R: Rng + ?Sized>(rng: &mut R) -> (Formula, Trace) {
    let formula = random_formula(rng, 4, 10);
    let needed = (formula.horizon() / DT).round() as usize + 1;
    let len = (needed + rng.random_range(0..20)).min(200);
    (formula, random_trace(rng, len))
}
