//! Signal Temporal Logic formulas.
//!
//! A [`Formula`] is built from arithmetic predicates over named signal
//! channels, Boolean connectives and bounded temporal operators. Conjunctions
//! and disjunctions are n-ary: the conjunction operators used by the
//! quantitative semantics are not associative, so `(a & b) & c` and
//! `a & b & c` are the same formula only after flattening, which the parser
//! and [`Formula::normalize`] always perform.
//!
//! ```
//! use stlrob::formula::{parse_formula, Formula};
//!
//! let phi = parse_formula("G[0,6](F[0,4](p1) & F[0,4](p2))").unwrap();
//! assert_eq!(phi.horizon(), 10.0);
//! assert!(matches!(phi, Formula::Always(..)));
//! assert_eq!(phi.to_string(), "G[0,6]((F[0,4](p1) & F[0,4](p2)))");
//! ```

mod parser;
mod printer;

use std::collections::BTreeSet;

use thiserror::Error;

pub use parser::parse_formula;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid interval [{a}, {b}]: bounds must satisfy 0 <= a <= b < inf")]
    Interval { a: f64, b: f64 },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
}

/// Closed time interval `[a, b]` in seconds, relative to the evaluation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, FormulaError> {
        if a.is_finite() && b.is_finite() && 0.0 <= a && a <= b {
            Ok(Interval { a, b })
        } else {
            Err(FormulaError::Interval { a, b })
        }
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }
}

/// Arithmetic expression `h(x)` over signal channels. A predicate holds when
/// the expression evaluates to a non-negative value.
#[derive(Debug, Clone, PartialEq)]
pub enum PredicateExpr {
    Const(f64),
    Channel(String),
    Add(Box<PredicateExpr>, Box<PredicateExpr>),
    Sub(Box<PredicateExpr>, Box<PredicateExpr>),
    /// Multiplication by a constant factor.
    Scale(f64, Box<PredicateExpr>),
    /// Euclidean norm of a vector of sub-expressions.
    Norm(Vec<PredicateExpr>),
}

impl PredicateExpr {
    pub fn channel(name: impl Into<String>) -> Self {
        PredicateExpr::Channel(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(lhs: PredicateExpr, rhs: PredicateExpr) -> Self {
        PredicateExpr::Add(Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(lhs: PredicateExpr, rhs: PredicateExpr) -> Self {
        PredicateExpr::Sub(Box::new(lhs), Box::new(rhs))
    }

    pub fn scale(factor: f64, expr: PredicateExpr) -> Self {
        PredicateExpr::Scale(factor, Box::new(expr))
    }

    /// `radius - ||(channels) - center||`, the signed margin of a ball.
    pub fn ball(channels: &[&str], center: &[f64], radius: f64) -> Self {
        let offsets = channels
            .iter()
            .zip(center)
            .map(|(c, x)| PredicateExpr::sub(PredicateExpr::channel(*c), PredicateExpr::Const(*x)))
            .collect();
        PredicateExpr::sub(PredicateExpr::Const(radius), PredicateExpr::Norm(offsets))
    }

    /// Names of all channels referenced by the expression.
    pub fn channels(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_channels(&mut out);
        out
    }

    fn collect_channels<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            PredicateExpr::Const(_) => {}
            PredicateExpr::Channel(name) => {
                out.insert(name.as_str());
            }
            PredicateExpr::Add(l, r) | PredicateExpr::Sub(l, r) => {
                l.collect_channels(out);
                r.collect_channels(out);
            }
            PredicateExpr::Scale(_, e) => e.collect_channels(out),
            PredicateExpr::Norm(items) => items.iter().for_each(|e| e.collect_channels(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    Predicate(PredicateExpr),
    Not(Box<Formula>),
    /// Conjunction of at least two operands.
    And(Vec<Formula>),
    /// Disjunction of at least two operands.
    Or(Vec<Formula>),
    Eventually(Interval, Box<Formula>),
    Always(Interval, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn predicate(expr: PredicateExpr) -> Self {
        Formula::Predicate(expr)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Flattened conjunction. A single operand is returned unchanged.
    pub fn and(operands: Vec<Formula>) -> Self {
        Self::nary(operands, true)
    }

    /// Flattened disjunction. A single operand is returned unchanged.
    pub fn or(operands: Vec<Formula>) -> Self {
        Self::nary(operands, false)
    }

    pub fn eventually(interval: Interval, f: Formula) -> Self {
        Formula::Eventually(interval, Box::new(f))
    }

    pub fn always(interval: Interval, f: Formula) -> Self {
        Formula::Always(interval, Box::new(f))
    }

    pub fn until(interval: Interval, lhs: Formula, rhs: Formula) -> Self {
        Formula::Until(interval, Box::new(lhs), Box::new(rhs))
    }

    fn nary(operands: Vec<Formula>, conjunction: bool) -> Self {
        let mut flat = Vec::with_capacity(operands.len());
        for op in operands {
            match (op, conjunction) {
                (Formula::And(inner), true) | (Formula::Or(inner), false) => flat.extend(inner),
                (other, _) => flat.push(other),
            }
        }
        match flat.len() {
            1 => flat.pop().expect("one operand"),
            _ if conjunction => Formula::And(flat),
            _ => Formula::Or(flat),
        }
    }

    /// Recursively flattens nested conjunctions and disjunctions.
    pub fn normalize(self) -> Self {
        match self {
            Formula::True | Formula::Predicate(_) => self,
            Formula::Not(f) => Formula::not(f.normalize()),
            Formula::And(ops) => Formula::and(ops.into_iter().map(Formula::normalize).collect()),
            Formula::Or(ops) => Formula::or(ops.into_iter().map(Formula::normalize).collect()),
            Formula::Eventually(i, f) => Formula::eventually(i, f.normalize()),
            Formula::Always(i, f) => Formula::always(i, f.normalize()),
            Formula::Until(i, l, r) => Formula::until(i, l.normalize(), r.normalize()),
        }
    }

    /// Length of the signal suffix, starting at the evaluation time, that the
    /// formula reads.
    pub fn horizon(&self) -> f64 {
        match self {
            Formula::True | Formula::Predicate(_) => 0.0,
            Formula::Not(f) => f.horizon(),
            Formula::And(ops) | Formula::Or(ops) => {
                ops.iter().map(Formula::horizon).fold(0.0, f64::max)
            }
            Formula::Eventually(i, f) | Formula::Always(i, f) => i.end() + f.horizon(),
            Formula::Until(i, l, r) => i.end() + l.horizon().max(r.horizon()),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::Predicate(_) => Vec::new(),
            Formula::Not(f) | Formula::Eventually(_, f) | Formula::Always(_, f) => vec![f],
            Formula::And(ops) | Formula::Or(ops) => ops.iter().collect(),
            Formula::Until(_, l, r) => vec![l, r],
        }
    }

    /// Every predicate in the formula, in pre-order.
    pub fn predicates(&self) -> Vec<&PredicateExpr> {
        let mut out = Vec::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates<'a>(&'a self, out: &mut Vec<&'a PredicateExpr>) {
        if let Formula::Predicate(p) = self {
            out.push(p);
        }
        for c in self.children() {
            c.collect_predicates(out);
        }
    }
}

/// Canonical text form; [`parse_formula`] reads it back to an equal formula.
pub fn format_formula(f: &Formula) -> String {
    f.to_string()
}

/// See [`Formula::horizon`].
pub fn formula_horizon(f: &Formula) -> f64 {
    f.horizon()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str) -> Formula {
        Formula::predicate(PredicateExpr::channel(name))
    }

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn horizon_examples() {
        assert_eq!(p("p1").horizon(), 0.0);
        let f = Formula::always(iv(0.0, 6.0), Formula::eventually(iv(0.0, 4.0), p("p1")));
        assert_eq!(f.horizon(), 10.0);
        let u = Formula::until(iv(2.0, 3.0), p("p1"), Formula::eventually(iv(0.0, 4.0), p("p2")));
        assert_eq!(u.horizon(), 7.0);
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(6.0, 0.0).is_err());
        assert!(Interval::new(-1.0, 2.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(1.5, 1.5).is_ok());
    }

    #[test]
    fn and_flattens_nested_operands() {
        let f = Formula::and(vec![Formula::and(vec![p("a"), p("b")]), p("c")]);
        assert_eq!(f, Formula::And(vec![p("a"), p("b"), p("c")]));
        // or inside and is kept
        let g = Formula::and(vec![Formula::or(vec![p("a"), p("b")]), p("c")]);
        assert!(matches!(&g, Formula::And(ops) if ops.len() == 2));
        assert_eq!(Formula::and(vec![p("a")]), p("a"));
    }

    #[test]
    fn normalize_is_idempotent_on_nested_tree() {
        let raw = Formula::Not(Box::new(Formula::And(vec![
            Formula::And(vec![p("a"), Formula::And(vec![p("b"), p("c")])]),
            p("d"),
        ])));
        let once = raw.normalize();
        assert_eq!(once.clone().normalize(), once);
        assert_eq!(once, Formula::not(Formula::And(vec![p("a"), p("b"), p("c"), p("d")])));
    }

    #[test]
    fn ball_predicate_channels() {
        let e = PredicateExpr::ball(&["x1", "x2"], &[1.5, 2.5], 0.2);
        assert_eq!(e.channels().into_iter().collect::<Vec<_>>(), vec!["x1", "x2"]);
    }
}
