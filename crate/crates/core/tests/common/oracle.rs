//! Direct min/max robustness recursion, written independently of the
//! library evaluator and memoized on (node, time index).

use std::collections::HashMap;

use stlrob::formula::{Formula, Interval, PredicateExpr};
use stlrob::trace::Trace;

fn h(e: &PredicateExpr, trace: &Trace, k: usize) -> f64 {
    match e {
        PredicateExpr::Const(c) => *c,
        PredicateExpr::Channel(name) => {
            let i = trace.channels().iter().position(|c| c == name).expect("channel");
            trace.value(k, i)
        }
        PredicateExpr::Add(a, b) => h(a, trace, k) + h(b, trace, k),
        PredicateExpr::Sub(a, b) => h(a, trace, k) - h(b, trace, k),
        PredicateExpr::Scale(c, a) => c * h(a, trace, k),
        PredicateExpr::Norm(items) => items.iter().map(|a| h(a, trace, k).powi(2)).sum::<f64>().sqrt(),
    }
}

fn steps(i: &Interval, dt: f64) -> (usize, usize) {
    ((i.start() / dt).round() as usize, (i.end() / dt).round() as usize)
}

pub struct Oracle<'a> {
    trace: &'a Trace,
    memo: HashMap<(*const Formula, usize), f64>,
}

impl<'a> Oracle<'a> {
    pub fn new(trace: &'a Trace) -> Self {
        Oracle { trace, memo: HashMap::new() }
    }

    pub fn rho(&mut self, f: &Formula, k: usize) -> f64 {
        if let Some(v) = self.memo.get(&(f as *const _, k)) {
            return *v;
        }
        let dt = self.trace.dt();
        let v = match f {
            Formula::True => f64::MAX,
            Formula::Predicate(p) => h(p, self.trace, k),
            Formula::Not(g) => -self.rho(g, k),
            Formula::And(ops) => ops.iter().map(|g| self.rho(g, k)).fold(f64::INFINITY, f64::min),
            Formula::Or(ops) => ops.iter().map(|g| self.rho(g, k)).fold(f64::NEG_INFINITY, f64::max),
            Formula::Eventually(i, g) => {
                let (a, b) = steps(i, dt);
                (k + a..=k + b).map(|j| self.rho(g, j)).fold(f64::NEG_INFINITY, f64::max)
            }
            Formula::Always(i, g) => {
                let (a, b) = steps(i, dt);
                (k + a..=k + b).map(|j| self.rho(g, j)).fold(f64::INFINITY, f64::min)
            }
            Formula::Until(i, l, r) => {
                let (a, b) = steps(i, dt);
                let mut best = f64::NEG_INFINITY;
                for j in k + a..=k + b {
                    let held = (k..=j).map(|m| self.rho(l, m)).fold(f64::INFINITY, f64::min);
                    best = best.max(self.rho(r, j).min(held));
                }
                best
            }
        };
        self.memo.insert((f as *const _, k), v);
        v
    }
}
