//! Quantitative and Boolean semantics.
//!
//! ```
//! use stlrob::formula::parse_formula;
//! use stlrob::semantics::{robustness_value, NewMetric, Traditional};
//! use stlrob::trace::Trace;
//!
//! let trace = Trace::new(0.0, 1.0, vec!["a".into(), "b".into()], vec![vec![1.0, 10.0]]).unwrap();
//! let f = parse_formula("a & b").unwrap();
//! assert_eq!(robustness_value(&Traditional, &f, &trace, 0.0).unwrap(), 1.0);
//! let smooth = robustness_value(&NewMetric::new(3.0).unwrap(), &f, &trace, 0.0).unwrap();
//! assert!(smooth > 1.0 && smooth < 10.0);
//! ```

mod eval;
mod metric;

pub use eval::{
    eval_boolean, robustness, robustness_signal, robustness_value, EvalError, NodeRobustness,
    RobustnessResult, TRUE_ROBUSTNESS,
};
pub use metric::{
    and_ag, and_new, and_traditional, ArithmeticGeometric, Metric, MetricError, MetricKind,
    NewMetric, Traditional,
};
