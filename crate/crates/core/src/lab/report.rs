use std::fmt;
use std::io::Write;

use super::LabError;

/// Identifies one numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyId {
    /// Sign of the robustness matches Boolean satisfaction.
    Soundness,
    IdempotenceCommutativity,
    WeakSmoothness,
    ShadowLifting,
    MinMaxBounds,
    ScaleInvariance,
    /// Gradient continuity at the origin; every sound, idempotent operator fails it.
    OriginSmoothness,
    /// Unit partial derivative at a unique zero minimum.
    BoundaryDerivative,
    /// The conjunction tends to the remaining term as the others grow.
    LimitBehavior,
    /// `∧(-1, ρ)` rises above `-1` for some `ρ > -1`.
    NonMonotoneLift,
}

impl PropertyId {
    pub const ALL: [PropertyId; 10] = [
        PropertyId::Soundness,
        PropertyId::IdempotenceCommutativity,
        PropertyId::WeakSmoothness,
        PropertyId::ShadowLifting,
        PropertyId::MinMaxBounds,
        PropertyId::ScaleInvariance,
        PropertyId::OriginSmoothness,
        PropertyId::BoundaryDerivative,
        PropertyId::LimitBehavior,
        PropertyId::NonMonotoneLift,
    ];

    /// Short column label.
    pub fn code(&self) -> &'static str {
        match self {
            PropertyId::Soundness => "P1",
            PropertyId::IdempotenceCommutativity => "P2",
            PropertyId::WeakSmoothness => "P3",
            PropertyId::ShadowLifting => "P4",
            PropertyId::MinMaxBounds => "P5",
            PropertyId::ScaleInvariance => "P6",
            PropertyId::OriginSmoothness => "smooth@0",
            PropertyId::BoundaryDerivative => "d/d0=1",
            PropertyId::LimitBehavior => "limit",
            PropertyId::NonMonotoneLift => "lift",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            PropertyId::Soundness => "soundness",
            PropertyId::IdempotenceCommutativity => "idempotence and commutativity",
            PropertyId::WeakSmoothness => "weak smoothness",
            PropertyId::ShadowLifting => "shadow-lifting",
            PropertyId::MinMaxBounds => "min/max boundedness",
            PropertyId::ScaleInvariance => "scale invariance",
            PropertyId::OriginSmoothness => "gradient continuity at the origin",
            PropertyId::BoundaryDerivative => "unit partial at a zero minimum",
            PropertyId::LimitBehavior => "limit as other terms grow",
            PropertyId::NonMonotoneLift => "non-monotone lift",
        }
    }

    /// Whether the check belongs to the six-property summary table.
    pub fn is_core(&self) -> bool {
        matches!(
            self,
            PropertyId::Soundness
                | PropertyId::IdempotenceCommutativity
                | PropertyId::WeakSmoothness
                | PropertyId::ShadowLifting
                | PropertyId::MinMaxBounds
                | PropertyId::ScaleInvariance
        )
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Outcome of one check. `passed` is always `max_violation <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub metric: String,
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Operand values at the worst violation (empty when nothing was violated).
    pub witness: Vec<f64>,
    /// How to reproduce the witness, e.g. the probed coordinate.
    pub detail: String,
}

impl PropertyReport {
    pub(crate) fn new(
        property: PropertyId,
        metric: String,
        samples: usize,
        tolerance: f64,
        worst: Worst,
    ) -> Self {
        let max_violation = if worst.violation.is_nan() { f64::INFINITY } else { worst.violation };
        PropertyReport {
            property,
            metric,
            samples,
            max_violation,
            tolerance,
            passed: max_violation <= tolerance,
            witness: worst.point,
            detail: worst.detail,
        }
    }

    pub fn mark(&self) -> &'static str {
        if self.passed {
            "✓"
        } else {
            "✗"
        }
    }
}

/// Running maximum of a violation measure.
#[derive(Debug, Clone)]
pub(crate) struct Worst {
    pub violation: f64,
    pub point: Vec<f64>,
    pub detail: String,
}

impl Worst {
    pub fn new() -> Self {
        Worst { violation: 0.0, point: Vec::new(), detail: String::new() }
    }

    /// Records `violation` if it is the largest so far. NaN counts as worst.
    pub fn offer(&mut self, violation: f64, point: &[f64], detail: impl FnOnce() -> String) {
        let worse = violation.is_nan() && !self.violation.is_nan() || violation > self.violation;
        if worse {
            self.violation = violation;
            self.point = point.to_vec();
            self.detail = detail();
        }
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";")
}

/// Writes reports as CSV: property, metric, samples, max_violation,
/// tolerance, pass, witness, detail.
pub fn write_reports_csv(reports: &[PropertyReport], out: impl Write) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["property", "metric", "samples", "max_violation", "tolerance", "pass", "witness", "detail"])?;
    for r in reports {
        w.write_record([
            r.property.code().to_string(),
            r.metric.clone(),
            r.samples.to_string(),
            format!("{:e}", r.max_violation),
            format!("{:e}", r.tolerance),
            r.passed.to_string(),
            join(&r.witness),
            r.detail.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per metric, one column per property, in first-seen order.
pub fn format_table(reports: &[PropertyReport]) -> String {
    let mut metrics: Vec<&str> = Vec::new();
    let mut props: Vec<PropertyId> = Vec::new();
    for r in reports {
        if !metrics.contains(&r.metric.as_str()) {
            metrics.push(&r.metric);
        }
        if !props.contains(&r.property) {
            props.push(r.property);
        }
    }
    let name_width = metrics.iter().map(|m| m.chars().count()).max().unwrap_or(0).max(6);
    let mut out = format!("{:<name_width$}", "metric");
    for p in &props {
        out.push_str(&format!(" | {:^8}", p.code()));
    }
    out.push('\n');
    out.push_str(&"-".repeat(name_width + props.len() * 11));
    out.push('\n');
    for m in &metrics {
        out.push_str(&format!("{m:<name_width$}"));
        for p in &props {
            let mark = reports
                .iter()
                .find(|r| r.metric == *m && r.property == *p)
                .map_or(" ", |r| r.mark());
            out.push_str(&format!(" | {mark:^8}"));
        }
        out.push('\n');
    }
    out
}
