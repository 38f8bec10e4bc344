use std::fmt;

use super::{Formula, Interval, PredicateExpr};

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start(), self.end())
    }
}

impl fmt::Display for PredicateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateExpr::Const(c) => write!(f, "{c}"),
            PredicateExpr::Channel(name) => f.write_str(name),
            PredicateExpr::Add(l, r) => write!(f, "({l} + {r})"),
            PredicateExpr::Sub(l, r) => write!(f, "({l} - {r})"),
            PredicateExpr::Scale(c, e) => write!(f, "({c} * {e})"),
            PredicateExpr::Norm(items) => {
                f.write_str("norm(")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::Predicate(p) => write!(f, "{p}"),
            Formula::Not(g) => write!(f, "!({g})"),
            Formula::And(ops) => write_nary(f, ops, " & "),
            Formula::Or(ops) => write_nary(f, ops, " | "),
            Formula::Eventually(i, g) => write!(f, "F{i}({g})"),
            Formula::Always(i, g) => write!(f, "G{i}({g})"),
            Formula::Until(i, l, r) => write!(f, "({l} U{i} {r})"),
        }
    }
}

fn write_nary(f: &mut fmt::Formatter<'_>, ops: &[Formula], sep: &str) -> fmt::Result {
    f.write_str("(")?;
    for (i, op) in ops.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{op}")?;
    }
    f.write_str(")")
}
