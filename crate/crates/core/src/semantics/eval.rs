//! Boolean and quantitative evaluation over sampled traces.
//!
//! Both semantics share one evaluator: every sub-formula is turned into a
//! signal over a contiguous range of sample indices that starts at the
//! evaluation time, and temporal operators fold their child's signal over
//! the samples of each window.

use thiserror::Error;

use super::metric::{Metric, MetricError};
use crate::formula::{Formula, Interval};
use crate::trace::{BoundExpr, Trace, TraceError, GRID_GUARD};

/// Robustness assigned to the `true` literal.
pub const TRUE_ROBUSTNESS: f64 = f64::MAX;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("trace ends at {trace_end} s but the formula needs samples up to {needed} s")]
    InsufficientTrace { needed: f64, trace_end: f64 },
    #[error("interval {0} contains no sample offsets at time step {1}")]
    EmptyWindow(Interval, f64),
}

/// Robustness of one node of the formula at the evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRobustness {
    pub depth: usize,
    pub formula: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessResult {
    pub value: f64,
    /// Every sub-formula in pre-order; the first entry is the root.
    pub nodes: Vec<NodeRobustness>,
}

trait Algebra {
    type V: Copy;
    fn atom(&self, h: f64) -> Self::V;
    fn top(&self) -> Self::V;
    fn not(&self, v: Self::V) -> Self::V;
    fn and(&self, vs: &[Self::V]) -> Result<Self::V, EvalError>;
    fn or(&self, vs: &[Self::V]) -> Result<Self::V, EvalError>;
}

struct Quantitative<'m>(&'m dyn Metric);

impl Algebra for Quantitative<'_> {
    type V = f64;

    fn atom(&self, h: f64) -> f64 {
        h
    }

    fn top(&self) -> f64 {
        TRUE_ROBUSTNESS
    }

    fn not(&self, v: f64) -> f64 {
        -v
    }

    fn and(&self, vs: &[f64]) -> Result<f64, EvalError> {
        Ok(self.0.and_n(vs)?)
    }

    fn or(&self, vs: &[f64]) -> Result<f64, EvalError> {
        Ok(self.0.or_n(vs)?)
    }
}

struct Boolean;

impl Algebra for Boolean {
    type V = bool;

    fn atom(&self, h: f64) -> bool {
        h >= 0.0
    }

    fn top(&self) -> bool {
        true
    }

    fn not(&self, v: bool) -> bool {
        !v
    }

    fn and(&self, vs: &[bool]) -> Result<bool, EvalError> {
        Ok(vs.iter().all(|v| *v))
    }

    fn or(&self, vs: &[bool]) -> Result<bool, EvalError> {
        Ok(vs.iter().any(|v| *v))
    }
}

/// Sample offsets `[lo, hi]` covered by `interval` at step `dt`.
fn offsets(interval: &Interval, dt: f64) -> Result<(usize, usize), EvalError> {
    let lo = (interval.start() / dt - GRID_GUARD).ceil().max(0.0);
    let hi = (interval.end() / dt + GRID_GUARD).floor();
    if lo > hi {
        return Err(EvalError::EmptyWindow(*interval, dt));
    }
    Ok((lo as usize, hi as usize))
}

struct Evaluator<'a, A: Algebra> {
    algebra: A,
    trace: &'a Trace,
    annotations: Option<Vec<NodeRobustness>>,
}

impl<A: Algebra> Evaluator<'_, A> {
    fn require(&self, last: usize) -> Result<(), EvalError> {
        if last >= self.trace.len() {
            return Err(EvalError::InsufficientTrace {
                needed: self.trace.time(last),
                trace_end: self.trace.end_time(),
            });
        }
        Ok(())
    }

    /// Values of `f` at sample indices `start..=end`.
    fn signal(
        &mut self,
        f: &Formula,
        start: usize,
        end: usize,
        depth: usize,
    ) -> Result<Vec<A::V>, EvalError>
    where
        A::V: Into<f64>,
    {
        let slot = self.annotations.as_mut().map(|nodes| {
            nodes.push(NodeRobustness { depth, formula: f.to_string(), value: f64::NAN });
            nodes.len() - 1
        });
        let out = self.compute(f, start, end, depth)?;
        if let (Some(i), Some(nodes)) = (slot, self.annotations.as_mut()) {
            nodes[i].value = out[0].into();
        }
        Ok(out)
    }

    fn compute(
        &mut self,
        f: &Formula,
        start: usize,
        end: usize,
        depth: usize,
    ) -> Result<Vec<A::V>, EvalError>
    where
        A::V: Into<f64>,
    {
        let len = end - start + 1;
        match f {
            Formula::True => Ok(vec![self.algebra.top(); len]),
            Formula::Predicate(p) => {
                self.require(end)?;
                let bound = BoundExpr::bind(p, self.trace.channels())?;
                Ok((start..=end).map(|k| self.algebra.atom(bound.eval(self.trace.row(k)))).collect())
            }
            Formula::Not(g) => {
                let s = self.signal(g, start, end, depth + 1)?;
                Ok(s.into_iter().map(|v| self.algebra.not(v)).collect())
            }
            Formula::And(ops) | Formula::Or(ops) => {
                let conj = matches!(f, Formula::And(_));
                let children = ops
                    .iter()
                    .map(|g| self.signal(g, start, end, depth + 1))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut column = Vec::with_capacity(children.len());
                let mut out = Vec::with_capacity(len);
                for j in 0..len {
                    column.clear();
                    column.extend(children.iter().map(|c| c[j]));
                    out.push(if conj { self.algebra.and(&column)? } else { self.algebra.or(&column)? });
                }
                Ok(out)
            }
            Formula::Always(interval, g) | Formula::Eventually(interval, g) => {
                let always = matches!(f, Formula::Always(..));
                let (lo, hi) = offsets(interval, self.trace.dt())?;
                self.require(end + hi)?;
                let child = self.signal(g, start, end + hi, depth + 1)?;
                (0..len)
                    .map(|j| {
                        let window = &child[j + lo..=j + hi];
                        if always {
                            self.algebra.and(window)
                        } else {
                            self.algebra.or(window)
                        }
                    })
                    .collect()
            }
            Formula::Until(interval, lhs, rhs) => {
                let (lo, hi) = offsets(interval, self.trace.dt())?;
                self.require(end + hi)?;
                let l = self.signal(lhs, start, end + hi, depth + 1)?;
                let r = self.signal(rhs, start, end + hi, depth + 1)?;
                let mut candidates = Vec::with_capacity(hi - lo + 1);
                let mut out = Vec::with_capacity(len);
                for j in 0..len {
                    candidates.clear();
                    for k1 in j + lo..=j + hi {
                        let held = self.algebra.and(&l[j..=k1])?;
                        candidates.push(self.algebra.and(&[r[k1], held])?);
                    }
                    out.push(self.algebra.or(&candidates)?);
                }
                Ok(out)
            }
        }
    }
}

fn root_index(f: &Formula, trace: &Trace, t: f64) -> Result<usize, EvalError> {
    let k = trace.index_of(t).map_err(|err| match err {
        TraceError::OffGrid(_) if t > trace.end_time() => EvalError::InsufficientTrace {
            needed: t + f.horizon(),
            trace_end: trace.end_time(),
        },
        other => other.into(),
    })?;
    Ok(k)
}

/// Quantitative robustness of `f` at time `t` with per-node diagnostics.
pub fn robustness(
    metric: &dyn Metric,
    f: &Formula,
    trace: &Trace,
    t: f64,
) -> Result<RobustnessResult, EvalError> {
    let k = root_index(f, trace, t)?;
    let mut ev = Evaluator { algebra: Quantitative(metric), trace, annotations: Some(Vec::new()) };
    let s = ev.signal(f, k, k, 0)?;
    Ok(RobustnessResult { value: s[0], nodes: ev.annotations.unwrap_or_default() })
}

/// Quantitative robustness of `f` at time `t`, without diagnostics.
pub fn robustness_value(
    metric: &dyn Metric,
    f: &Formula,
    trace: &Trace,
    t: f64,
) -> Result<f64, EvalError> {
    let k = root_index(f, trace, t)?;
    let mut ev = Evaluator { algebra: Quantitative(metric), trace, annotations: None };
    Ok(ev.signal(f, k, k, 0)?[0])
}

/// Robustness of `f` at every sample index in `start..=end`.
pub fn robustness_signal(
    metric: &dyn Metric,
    f: &Formula,
    trace: &Trace,
    start: usize,
    end: usize,
) -> Result<Vec<f64>, EvalError> {
    if start > end {
        return Ok(Vec::new());
    }
    let mut ev = Evaluator { algebra: Quantitative(metric), trace, annotations: None };
    ev.signal(f, start, end, 0)
}

/// Boolean satisfaction of `f` at time `t`.
pub fn eval_boolean(f: &Formula, trace: &Trace, t: f64) -> Result<bool, EvalError> {
    let k = root_index(f, trace, t)?;
    let mut ev = Evaluator { algebra: Boolean, trace, annotations: None };
    Ok(ev.signal(f, k, k, 0)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, PredicateExpr};
    use crate::semantics::metric::{MetricKind, NewMetric, Traditional};

    fn trace_of(columns: &[(&str, Vec<f64>)], dt: f64) -> Trace {
        let n = columns[0].1.len();
        let rows = (0..n).map(|k| columns.iter().map(|(_, c)| c[k]).collect()).collect();
        Trace::new(0.0, dt, columns.iter().map(|(n, _)| n.to_string()).collect(), rows).unwrap()
    }

    #[test]
    fn constant_predicate_is_true() {
        let t = trace_of(&[("h", vec![0.5; 10])], 0.1);
        let f = parse_formula("h").unwrap();
        for k in 0..10 {
            assert!(eval_boolean(&f, &t, k as f64 * 0.1).unwrap());
        }
    }

    #[test]
    fn always_with_one_violating_sample() {
        let mut h = vec![0.5; 11];
        h[7] = -1.0;
        let t = trace_of(&[("h", h)], 0.1);
        let f = parse_formula("G[0,1] h").unwrap();
        assert!(!eval_boolean(&f, &t, 0.0).unwrap());
        assert_eq!(robustness_value(&Traditional, &f, &t, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn traditional_conjunction_of_constants() {
        let t = trace_of(&[("h1", vec![1.0; 3]), ("h2", vec![10.0; 3])], 1.0);
        let f = parse_formula("h1 & h2").unwrap();
        assert_eq!(robustness_value(&Traditional, &f, &t, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn negation_flips_sign_for_every_metric() {
        let t = trace_of(&[("h", vec![0.3; 2])], 1.0);
        let f = parse_formula("!h").unwrap();
        for m in [MetricKind::Traditional, MetricKind::Ag, MetricKind::new_metric(3.0).unwrap()] {
            assert_eq!(robustness_value(&m, &f, &t, 0.0).unwrap(), -0.3);
        }
    }

    #[test]
    fn eventually_of_rising_ramp() {
        let h: Vec<f64> = (0..=200).map(|k| -1.0 + 2.0 * k as f64 / 200.0).collect();
        let t = trace_of(&[("h", h)], 0.02);
        let f = parse_formula("F[0,4] h").unwrap();
        assert!((robustness_value(&Traditional, &f, &t, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn insufficient_trace_is_reported() {
        let t = trace_of(&[("h", vec![1.0; 100])], 0.02);
        let f = parse_formula("F[0,4] h").unwrap();
        assert!(matches!(
            robustness_value(&Traditional, &f, &t, 0.0),
            Err(EvalError::InsufficientTrace { .. })
        ));
        assert!(matches!(eval_boolean(&f, &t, 0.0), Err(EvalError::InsufficientTrace { .. })));
        let g = parse_formula("h").unwrap();
        assert!(matches!(
            robustness_value(&Traditional, &g, &t, 50.0),
            Err(EvalError::InsufficientTrace { .. })
        ));
    }

    #[test]
    fn empty_window_between_samples() {
        let t = trace_of(&[("h", vec![1.0; 10])], 0.1);
        let f = parse_formula("F[0.01,0.02] h").unwrap();
        assert!(matches!(robustness_value(&Traditional, &f, &t, 0.0), Err(EvalError::EmptyWindow(..))));
    }

    #[test]
    fn until_semantics() {
        // l holds until sample 3, r becomes true at sample 2
        let l = vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0];
        let r = vec![-2.0, -2.0, 0.5, 0.5, 0.5, 0.5];
        let t = trace_of(&[("l", l), ("r", r)], 1.0);
        let f = parse_formula("l U[0,3] r").unwrap();
        assert!(eval_boolean(&f, &t, 0.0).unwrap());
        // max over k1 of min(r(k1), min l[0..=k1]) = min(0.5, 1) at k1 = 2
        assert_eq!(robustness_value(&Traditional, &f, &t, 0.0).unwrap(), 0.5);
        let g = parse_formula("l U[3,3] r").unwrap();
        assert!(!eval_boolean(&g, &t, 0.0).unwrap());
        assert_eq!(robustness_value(&Traditional, &g, &t, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn true_literal() {
        let t = trace_of(&[("h", vec![-1.0; 3])], 1.0);
        let f = Formula::True;
        assert_eq!(robustness_value(&Traditional, &f, &t, 0.0).unwrap(), TRUE_ROBUSTNESS);
        let g = parse_formula("true U[0,1] h").unwrap();
        assert!(!eval_boolean(&g, &t, 0.0).unwrap());
        let m = NewMetric::new(3.0).unwrap();
        assert!(robustness_value(&m, &parse_formula("true | h").unwrap(), &t, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn annotations_cover_every_node() {
        let t = trace_of(&[("x1", vec![0.2; 6]), ("x2", vec![-0.1; 6])], 1.0);
        let f = parse_formula("G[0,2](x1 & F[0,3] x2)").unwrap();
        let res = robustness(&Traditional, &f, &t, 0.0).unwrap();
        assert_eq!(res.nodes.len(), f.size());
        assert_eq!(res.nodes[0].value, res.value);
        assert_eq!(res.nodes[0].depth, 0);
        assert_eq!(res.value, -0.1);
        assert_eq!(res.nodes[2].formula, "x1");
        assert_eq!(res.nodes[2].value, 0.2);
    }

    #[test]
    fn evaluation_at_later_time_and_off_grid() {
        let h: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let t = trace_of(&[("h", h)], 0.5);
        let f = Formula::predicate(PredicateExpr::channel("h"));
        assert_eq!(robustness_value(&Traditional, &f, &t, 3.0).unwrap(), 6.0);
        assert!(robustness_value(&Traditional, &f, &t, 3.1).is_err());
    }
}
