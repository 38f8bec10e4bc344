//! Conjunction operators.
//!
//! A robustness metric is fully determined by its M-ary AND operator:
//! negation is fixed to `-ρ`, disjunction is the De Morgan dual of the
//! conjunction, and the temporal operators are conjunctions (or their duals)
//! over the samples of a time window.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("conjunction of an empty operand list")]
    Empty,
    #[error("metric parameter nu must be positive and finite, got {0}")]
    InvalidNu(f64),
    #[error("unknown metric `{0}` (expected trad, ag or new)")]
    Unknown(String),
}

/// An M-ary conjunction operator. Implementations are pure.
pub trait Metric: Send + Sync {
    fn name(&self) -> String;

    /// Conjunction of `values`; a single operand is returned unchanged.
    fn and_n(&self, values: &[f64]) -> Result<f64, MetricError>;

    /// Disjunction derived from the conjunction by De Morgan's law.
    fn or_n(&self, values: &[f64]) -> Result<f64, MetricError> {
        let negated: Vec<f64> = values.iter().map(|v| -v).collect();
        Ok(-self.and_n(&negated)?)
    }
}

fn min_of(values: &[f64]) -> Result<f64, MetricError> {
    if values.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// `min(ρ_1, …, ρ_M)`.
pub fn and_traditional(values: &[f64]) -> Result<f64, MetricError> {
    min_of(values)
}

/// Arithmetic-geometric mean conjunction.
///
/// When some operand is non-positive the result is the mean of the negative
/// parts, `(1/M) Σ min(ρ_i, 0)`. Otherwise it is the geometric mean of
/// `1 + ρ_i`, minus one, computed in log space.
pub fn and_ag(values: &[f64]) -> Result<f64, MetricError> {
    let min = min_of(values)?;
    if values.len() == 1 {
        return Ok(values[0]);
    }
    let m = values.len() as f64;
    if min <= 0.0 {
        return Ok(values.iter().map(|v| v.min(0.0)).sum::<f64>() / m);
    }
    let mean_log = values.iter().map(|v| v.ln_1p()).sum::<f64>() / m;
    Ok(mean_log.exp_m1().min(f64::MAX))
}

/// Smooth, scale-invariant conjunction with sharpness `nu`.
///
/// With `ρ̃_i = (ρ_i - ρ_min) / ρ_min`, the violated case averages the
/// effective values `ρ_min e^{ρ̃_i}` with weights `e^{ν ρ̃_i}`; the satisfied
/// case averages the `ρ_i` themselves with weights `e^{-ν ρ̃_i}`. Both
/// exponents are non-positive. `ρ_min = 0` maps to exactly zero.
pub fn and_new(values: &[f64], nu: f64) -> Result<f64, MetricError> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(MetricError::InvalidNu(nu));
    }
    let min = min_of(values)?;
    if values.len() == 1 {
        return Ok(values[0]);
    }
    if min == 0.0 {
        return Ok(0.0);
    }
    if min < 0.0 {
        let mut num = 0.0;
        let mut den = 0.0;
        for v in values {
            let r = (v - min) / min;
            num += ((1.0 + nu) * r).exp();
            den += (nu * r).exp();
        }
        return Ok(min * (num / den));
    }
    let mut den = 0.0;
    let mut weighted_excess = 0.0;
    for v in values {
        let w = (-nu * (v - min) / min).exp();
        den += w;
        if w > 0.0 {
            weighted_excess += w * (v - min);
        }
    }
    Ok((min + weighted_excess / den).min(f64::MAX))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Traditional;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArithmeticGeometric;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewMetric {
    nu: f64,
}

impl NewMetric {
    pub const DEFAULT_NU: f64 = 3.0;

    pub fn new(nu: f64) -> Result<Self, MetricError> {
        if nu > 0.0 && nu.is_finite() {
            Ok(NewMetric { nu })
        } else {
            Err(MetricError::InvalidNu(nu))
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Default for NewMetric {
    fn default() -> Self {
        NewMetric { nu: Self::DEFAULT_NU }
    }
}

impl Metric for Traditional {
    fn name(&self) -> String {
        "traditional".into()
    }

    fn and_n(&self, values: &[f64]) -> Result<f64, MetricError> {
        and_traditional(values)
    }

    fn or_n(&self, values: &[f64]) -> Result<f64, MetricError> {
        if values.is_empty() {
            return Err(MetricError::Empty);
        }
        Ok(values.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

impl Metric for ArithmeticGeometric {
    fn name(&self) -> String {
        "ag".into()
    }

    fn and_n(&self, values: &[f64]) -> Result<f64, MetricError> {
        and_ag(values)
    }
}

impl Metric for NewMetric {
    fn name(&self) -> String {
        format!("new(nu={})", self.nu)
    }

    fn and_n(&self, values: &[f64]) -> Result<f64, MetricError> {
        and_new(values, self.nu)
    }
}

/// Closed set of the built-in metrics, convenient for configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    Traditional,
    Ag,
    New(NewMetric),
}

impl MetricKind {
    pub fn new_metric(nu: f64) -> Result<Self, MetricError> {
        Ok(MetricKind::New(NewMetric::new(nu)?))
    }

    /// Parses `trad`, `ag` or `new`; `nu` applies to the latter.
    pub fn parse(name: &str, nu: f64) -> Result<Self, MetricError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "trad" | "traditional" => Ok(MetricKind::Traditional),
            "ag" => Ok(MetricKind::Ag),
            "new" => Self::new_metric(nu),
            other => Err(MetricError::Unknown(other.to_string())),
        }
    }

    /// Short identifier used in file names and tables.
    pub fn label(&self) -> &'static str {
        match self {
            MetricKind::Traditional => "trad",
            MetricKind::Ag => "ag",
            MetricKind::New(_) => "new",
        }
    }

    pub fn as_metric(&self) -> &dyn Metric {
        match self {
            MetricKind::Traditional => &Traditional,
            MetricKind::Ag => &ArithmeticGeometric,
            MetricKind::New(m) => m,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_metric().name())
    }
}

impl FromStr for MetricKind {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s, NewMetric::DEFAULT_NU)
    }
}

impl Metric for MetricKind {
    fn name(&self) -> String {
        self.as_metric().name()
    }

    fn and_n(&self, values: &[f64]) -> Result<f64, MetricError> {
        self.as_metric().and_n(values)
    }

    fn or_n(&self, values: &[f64]) -> Result<f64, MetricError> {
        self.as_metric().or_n(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn traditional_values() {
        assert_eq!(and_traditional(&[1.0; 5]).unwrap(), 1.0);
        assert_eq!(and_traditional(&[1.0, 10.0, 10.0, 10.0, 10.0]).unwrap(), 1.0);
        assert_eq!(and_traditional(&[-2.0, 5.0]).unwrap(), -2.0);
        assert_eq!(and_traditional(&[]), Err(MetricError::Empty));
    }

    #[test]
    fn ag_values() {
        // (2 * 11^4)^(1/5) - 1
        let expected = (2.0f64 * 11f64.powi(4)).powf(0.2) - 1.0;
        assert_abs_diff_eq!(and_ag(&[1.0, 10.0, 10.0, 10.0, 10.0]).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 6.822042, epsilon = 1e-6);
        assert_eq!(and_ag(&[-1.0, 2.0]).unwrap(), -0.5);
        assert_abs_diff_eq!(and_ag(&[0.7; 4]).unwrap(), 0.7, epsilon = 1e-14);
        assert_eq!(and_ag(&[]), Err(MetricError::Empty));
    }

    #[test]
    fn ag_violation_branch_matches_fixed_operand_curve() {
        // with ρ1 = -1 fixed the AG conjunction is (min(ρ2, 0) - 1) / 2
        for rho2 in [-1.1, -0.6, -0.2, 0.0, 0.05] {
            assert_abs_diff_eq!(and_ag(&[-1.0, rho2]).unwrap(), (rho2.min(0.0) - 1.0) / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn new_metric_values() {
        let f = |nu: f64| -(1.0 + (-(1.0 + nu)).exp()) / (1.0 + (-nu).exp());
        assert_abs_diff_eq!(and_new(&[-1.0, 0.0], 1.0).unwrap(), f(1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(f(1.0), -0.829997, epsilon = 1e-6);
        assert_abs_diff_eq!(and_new(&[-1.0, 0.0], 3.0).unwrap(), f(3.0), epsilon = 1e-15);
        assert_abs_diff_eq!(f(3.0), -0.97002, epsilon = 1e-5);
        let pos = (1.0 + 1.2 * (-0.2f64).exp()) / (1.0 + (-0.2f64).exp());
        assert_abs_diff_eq!(and_new(&[1.0, 1.2], 1.0).unwrap(), pos, epsilon = 1e-15);
        assert_abs_diff_eq!(pos, 1.090033, epsilon = 1e-6);
        assert_eq!(and_new(&[0.4; 3], 3.0).unwrap(), 0.4);
        assert_eq!(and_new(&[0.0, 7.0], 3.0).unwrap(), 0.0);
        assert_eq!(and_new(&[], 3.0), Err(MetricError::Empty));
        assert_eq!(and_new(&[1.0], 0.0), Err(MetricError::InvalidNu(0.0)));
        assert_eq!(and_new(&[1.0], -1.0), Err(MetricError::InvalidNu(-1.0)));
    }

    #[test]
    fn new_metric_handles_extreme_operands() {
        let v = and_new(&[f64::MAX, f64::MAX], 3.0).unwrap();
        assert_eq!(v, f64::MAX);
        let v = and_new(&[-f64::MAX, 5.0], 3.0).unwrap();
        assert!(v.is_finite() && v < 0.0);
        let v = and_new(&[0.1, f64::MAX], 3.0).unwrap();
        assert_eq!(v, 0.1);
        assert!(and_ag(&[f64::MAX, f64::MAX]).unwrap().is_finite());
    }

    #[test]
    fn single_operand_is_identity() {
        for m in [MetricKind::Traditional, MetricKind::Ag, MetricKind::new_metric(3.0).unwrap()] {
            for v in [-3.0, 0.0, 2.5] {
                assert_eq!(m.and_n(&[v]).unwrap(), v);
                assert_eq!(m.or_n(&[v]).unwrap(), v);
            }
        }
    }

    #[test]
    fn disjunction_is_de_morgan_dual() {
        let xs = [-0.4, 1.3, 0.2];
        assert_eq!(Traditional.or_n(&xs).unwrap(), 1.3);
        let m = NewMetric::new(2.0).unwrap();
        let neg: Vec<f64> = xs.iter().map(|v| -v).collect();
        assert_eq!(m.or_n(&xs).unwrap(), -and_new(&neg, 2.0).unwrap());
    }

    #[test]
    fn metric_kind_parsing() {
        assert_eq!(MetricKind::parse("trad", 3.0).unwrap(), MetricKind::Traditional);
        assert_eq!(MetricKind::parse("AG", 3.0).unwrap(), MetricKind::Ag);
        assert_eq!("new".parse::<MetricKind>().unwrap(), MetricKind::new_metric(3.0).unwrap());
        assert!(MetricKind::parse("new", 0.0).is_err());
        assert!(MetricKind::parse("softmin", 1.0).is_err());
    }
}
