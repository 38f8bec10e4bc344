//! Numerical verification of conjunction-operator properties.
//!
//! Every checker samples points from a seeded random source, measures the
//! largest violation of one property and reports it together with the
//! point where it was observed. Checkers only use the [`Metric`] trait, so
//! user-defined operators can be checked the same way as the built-in ones.

mod checks;
pub mod generate;
mod report;

use thiserror::Error;

use crate::semantics::{EvalError, Metric, MetricError};

pub use checks::{
    check_boundary_derivative, check_idempotence_commutativity, check_limit_behavior,
    check_minmax_bounds, check_non_monotone_lift, check_origin_smoothness, check_scale_invariance,
    check_shadow_lifting, check_soundness, check_weak_smoothness, equal_point_partial, max_lift,
    run_all_checks, LabConfig,
};
pub use report::{format_table, write_reports_csv, PropertyId, PropertyReport};

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("metric returned a non-finite value {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("coordinate {index} out of range for a point of length {len}")]
    Index { index: usize, len: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Central-difference estimate of one partial derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientProbe {
    pub point: Vec<f64>,
    pub index: usize,
    pub step: f64,
    pub estimate: f64,
}

impl GradientProbe {
    pub fn new(metric: &dyn Metric, point: &[f64], index: usize, step: f64) -> Result<Self, LabError> {
        let estimate = numeric_partial(metric, point, index, step)?;
        Ok(GradientProbe { point: point.to_vec(), index, step, estimate })
    }
}

pub(crate) fn eval_at(metric: &dyn Metric, point: &[f64]) -> Result<f64, LabError> {
    let value = metric.and_n(point)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(LabError::NonFinite { point: point.to_vec(), value })
    }
}

fn shifted(metric: &dyn Metric, point: &[f64], index: usize, delta: f64) -> Result<f64, LabError> {
    let mut p = point.to_vec();
    p[index] += delta;
    eval_at(metric, &p)
}

fn validate(point: &[f64], index: usize, h: f64) -> Result<(), LabError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(LabError::InvalidStep(h));
    }
    if index >= point.len() {
        return Err(LabError::Index { index, len: point.len() });
    }
    Ok(())
}

/// `(f(ρ_i + h) - f(ρ_i - h)) / 2h`.
pub fn numeric_partial(metric: &dyn Metric, point: &[f64], index: usize, h: f64) -> Result<f64, LabError> {
    validate(point, index, h)?;
    let plus = shifted(metric, point, index, h)?;
    let minus = shifted(metric, point, index, -h)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Left and right one-sided derivative estimates of coordinate `index`.
///
/// Uses the second-order stencils `±(3f(x) - 4f(x ∓ h) + f(x ∓ 2h)) / 2h`,
/// which only sample one side of `x`, so a kink at `x` shows up as a gap
/// between the two values while smooth curvature does not.
pub fn one_sided_partials(
    metric: &dyn Metric,
    point: &[f64],
    index: usize,
    h: f64,
) -> Result<(f64, f64), LabError> {
    validate(point, index, h)?;
    let f0 = eval_at(metric, point)?;
    let r1 = shifted(metric, point, index, h)?;
    let r2 = shifted(metric, point, index, 2.0 * h)?;
    let l1 = shifted(metric, point, index, -h)?;
    let l2 = shifted(metric, point, index, -2.0 * h)?;
    let left = (3.0 * f0 - 4.0 * l1 + l2) / (2.0 * h);
    let right = (-3.0 * f0 + 4.0 * r1 - r2) / (2.0 * h);
    Ok((left, right))
}
