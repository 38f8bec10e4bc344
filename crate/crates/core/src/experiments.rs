//! The two-goal case study: metric × guidance sweeps of guided PI², success
//! tables, convergence bands, and the hand-computed optimal plan.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{input_energy, simulate, DynamicsError, Guidance, Scenario};
use crate::pi2::{run_pi2, LearningHistory, NoiseShape, Pi2Config, Pi2Error};
use crate::semantics::{robustness_value, EvalError, MetricKind};
use crate::trace::{format_significant, Trace};

/// Robustness a run must reach at its last iteration.
pub const SUCCESS_RHO: f64 = 0.05;
/// Final costs at or above this belong to the infeasible basin.
pub const SUCCESS_COST_BOUND: f64 = 3.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Pi2(#[from] Pi2Error),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Exploration settings used for the case study.
///
/// Noise is drawn once per 25 steps (0.5 s) and interpolated linearly in
/// between, so rollouts explore smooth velocity changes; independent
/// per-step noise averages out over the horizon and barely moves the robot.
pub fn case_study_config(seed: u64) -> Pi2Config {
    Pi2Config {
        rollouts: 20,
        iterations: 1000,
        sigma0: 0.05,
        sigma_decay: 0.997,
        h: 10.0,
        rho_target: SUCCESS_RHO,
        w_max: 100.0,
        noise_block: 25,
        noise_shape: NoiseShape::Linear,
        seed,
    }
}

/// Constant-velocity plan through a list of timed waypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct WaypointPlan {
    /// `(time, position)`, starting at the initial state.
    pub waypoints: Vec<(f64, [f64; 2])>,
}

impl WaypointPlan {
    /// Velocity on the segment containing `t`; zero after the last waypoint.
    pub fn velocity(&self, t: f64) -> [f64; 2] {
        for w in self.waypoints.windows(2) {
            let ((t0, p0), (t1, p1)) = (w[0], w[1]);
            if t < t1 - 1e-9 {
                let span = t1 - t0;
                return [(p1[0] - p0[0]) / span, (p1[1] - p0[1]) / span];
            }
        }
        [0.0, 0.0]
    }

    /// Energy of the continuous plan, `Σ d_i²/Δt_i`.
    pub fn energy(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| {
                let ((t0, p0), (t1, p1)) = (w[0], w[1]);
                let d = (p1[0] - p0[0]).hypot(p1[1] - p0[1]);
                d * d / (t1 - t0)
            })
            .sum()
    }

    /// Rolls the plan out as a feedforward on `scenario`.
    pub fn simulate(&self, scenario: &Scenario) -> Result<Trace, DynamicsError> {
        simulate(&scenario.robot, |_, t, _| self.velocity(t), &scenario.guides)
    }
}

/// The cheapest plan for the case study together with its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticOptimum {
    pub plan: WaypointPlan,
    /// Distance from the start to the first goal's boundary point.
    pub first_leg: f64,
    /// Distance between the two goals' boundary points.
    pub inter_goal: f64,
    /// `d0²/2 + 3·d²/2`.
    pub cost: f64,
}

/// Visits g1 at t = 2, g2 at 4, g1 at 6 and g2 at 8 at constant speed,
/// entering each goal just deep enough to reach the robustness target.
pub fn analytic_optimum() -> AnalyticOptimum {
    let scenario = Scenario::case_study(Guidance::None);
    let x0 = scenario.robot.x0;
    let (g1, g2) = (scenario.goals[0], scenario.goals[1]);
    let depth = g1.radius - SUCCESS_RHO;
    // Point at distance `depth` from `center`, on the segment toward `from`.
    let toward = |from: [f64; 2], center: [f64; 2]| {
        let d = (from[0] - center[0]).hypot(from[1] - center[1]);
        [center[0] + (from[0] - center[0]) * depth / d, center[1] + (from[1] - center[1]) * depth / d]
    };
    let p1 = toward(g2.center, g1.center);
    let p2 = toward(g1.center, g2.center);
    let entry = toward(x0, g1.center);
    let plan = WaypointPlan { waypoints: vec![(0.0, x0), (2.0, entry), (4.0, p2), (6.0, p1), (8.0, p2)] };
    let dist = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let first_leg = dist(x0, g1.center) - depth;
    let inter_goal = dist(g1.center, g2.center) - 2.0 * depth;
    let cost = first_leg * first_leg / 2.0 + 3.0 * inter_goal * inter_goal / 2.0;
    AnalyticOptimum { plan, first_leg, inter_goal, cost }
}

/// A sweep over metrics, guidance profiles and seeds.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub metrics: Vec<MetricKind>,
    pub guidance: Vec<Guidance>,
    pub seeds: Vec<u64>,
    /// Template for every run; the seed is replaced per run.
    pub pi2: Pi2Config,
}

impl ExperimentPlan {
    pub fn new(metrics: Vec<MetricKind>, guidance: Vec<Guidance>, seeds: Vec<u64>) -> Self {
        ExperimentPlan { metrics, guidance, seeds, pi2: case_study_config(0) }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.metrics.is_empty() || self.guidance.is_empty() || self.seeds.is_empty() {
            return Err(ExperimentError::Plan("metrics, guidance and seeds must be non-empty".into()));
        }
        self.pi2.validate()?;
        Ok(())
    }
}

/// Outcome of one seeded learning run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub success: bool,
    /// First iteration meeting the robustness target.
    pub first_success: Option<usize>,
    pub final_rho: f64,
    pub final_cost: f64,
    pub history: LearningHistory,
}

impl RunOutcome {
    fn classify(seed: u64, history: LearningHistory) -> Self {
        let (final_rho, final_cost) = history.last().map_or((f64::NAN, f64::NAN), |r| (r.rho, r.cost));
        RunOutcome {
            seed,
            success: final_rho >= SUCCESS_RHO && final_cost < SUCCESS_COST_BOUND,
            first_success: history.first_success(),
            final_rho,
            final_cost,
            history,
        }
    }
}

/// 10th, 50th and 90th percentiles, NaN when there is no data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantiles {
    pub p10: f64,
    pub median: f64,
    pub p90: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        v.sort_by(f64::total_cmp);
        Quantiles { p10: quantile(&v, 0.1), median: quantile(&v, 0.5), p90: quantile(&v, 0.9) }
    }
}

/// Linear interpolation between order statistics of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let i = pos.floor() as usize;
            let j = (i + 1).min(n - 1);
            sorted[i] + (sorted[j] - sorted[i]) * (pos - i as f64)
        }
    }
}

/// Per-iteration bands over the successful runs of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub iteration: usize,
    pub rho: Quantiles,
    pub cost: Quantiles,
}

#[derive(Debug, Clone)]
pub struct ConfigSummary {
    pub metric: MetricKind,
    pub guidance: Guidance,
    pub runs: Vec<RunOutcome>,
    pub success_rate: f64,
    pub iterations_to_satisfaction: Quantiles,
    pub final_cost: Quantiles,
    pub curve: Vec<CurvePoint>,
}

impl ConfigSummary {
    fn aggregate(metric: MetricKind, guidance: Guidance, runs: Vec<RunOutcome>, iterations: usize) -> Self {
        let ok: Vec<&RunOutcome> = runs.iter().filter(|r| r.success).collect();
        let success_rate = ok.len() as f64 / runs.len() as f64;
        let firsts: Vec<f64> = ok.iter().filter_map(|r| r.first_success.map(|k| k as f64)).collect();
        let costs: Vec<f64> = ok.iter().map(|r| r.final_cost).collect();
        let curve = (0..iterations)
            .map(|i| {
                let rho: Vec<f64> = ok.iter().map(|r| r.history.records[i].rho).collect();
                let cost: Vec<f64> = ok.iter().map(|r| r.history.records[i].cost).collect();
                CurvePoint { iteration: i + 1, rho: Quantiles::of(&rho), cost: Quantiles::of(&cost) }
            })
            .collect();
        ConfigSummary {
            metric,
            guidance,
            runs,
            success_rate,
            iterations_to_satisfaction: Quantiles::of(&firsts),
            final_cost: Quantiles::of(&costs),
            curve,
        }
    }

    /// File stem like `new_strong`.
    pub fn stem(&self) -> String {
        format!("{}_{}", self.metric.label(), self.guidance.label())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub configs: Vec<ConfigSummary>,
}

impl ExperimentSummary {
    pub fn get(&self, metric: &str, guidance: Guidance) -> Option<&ConfigSummary> {
        self.configs.iter().find(|c| c.metric.label() == metric && c.guidance == guidance)
    }

    /// One row per configuration: success rate and quantiles.
    pub fn write_csv(&self, out: impl Write) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "metric",
            "guidance",
            "runs",
            "success_rate",
            "iters_p10",
            "iters_median",
            "iters_p90",
            "cost_p10",
            "cost_median",
            "cost_p90",
        ])?;
        for c in &self.configs {
            let q = |v: &Quantiles| [v.p10, v.median, v.p90].map(|x| format_significant(x, 6));
            let mut row = vec![
                c.metric.to_string(),
                c.guidance.to_string(),
                c.runs.len().to_string(),
                format_significant(c.success_rate, 6),
            ];
            row.extend(q(&c.iterations_to_satisfaction));
            row.extend(q(&c.final_cost));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Plain-text success table, metrics as rows and guidance as columns.
    pub fn format_table(&self) -> String {
        let mut guidance: Vec<Guidance> = self.configs.iter().map(|c| c.guidance).collect();
        guidance.sort();
        guidance.dedup();
        let mut metrics: Vec<String> = Vec::new();
        for c in &self.configs {
            let name = c.metric.to_string();
            if !metrics.contains(&name) {
                metrics.push(name);
            }
        }
        let mut s = format!("{:<12}", "metric");
        for g in &guidance {
            s.push_str(&format!("{:>10}", g.label()));
        }
        s.push('\n');
        for m in &metrics {
            s.push_str(&format!("{m:<12}"));
            for g in &guidance {
                match self.configs.iter().find(|c| &c.metric.to_string() == m && c.guidance == *g) {
                    Some(c) => s.push_str(&format!("{:>9.0}%", 100.0 * c.success_rate)),
                    None => s.push_str(&format!("{:>10}", "-")),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Runs every (metric, guidance, seed) triple and aggregates per
/// configuration. Runs execute in parallel; results keep plan order.
pub fn run_casestudy(plan: &ExperimentPlan) -> Result<ExperimentSummary, ExperimentError> {
    plan.validate()?;
    let jobs: Vec<(usize, usize, u64)> = (0..plan.metrics.len())
        .flat_map(|m| (0..plan.guidance.len()).flat_map(move |g| plan.seeds.iter().map(move |&s| (m, g, s))))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(m, g, seed)| {
            let scenario = Scenario::case_study(plan.guidance[g]);
            let config = Pi2Config { seed, ..plan.pi2 };
            let history = run_pi2(&config, &scenario, &plan.metrics[m], &scenario.formula)?;
            Ok(RunOutcome::classify(seed, history))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let mut outcomes = outcomes.into_iter();
    let mut configs = Vec::new();
    for metric in &plan.metrics {
        for guidance in &plan.guidance {
            let runs: Vec<RunOutcome> = outcomes.by_ref().take(plan.seeds.len()).collect();
            configs.push(ConfigSummary::aggregate(*metric, *guidance, runs, plan.pi2.iterations));
        }
    }
    Ok(ExperimentSummary { configs })
}

/// Writes `<metric>_<guidance>.csv` with per-iteration bands for every
/// configuration; quantiles are NaN where no run succeeded.
pub fn export_curves(summary: &ExperimentSummary, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, ExperimentError> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for c in &summary.configs {
        let path = out_dir.join(format!("{}.csv", c.stem()));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["iteration", "rho_median", "rho_p10", "rho_p90", "cost_median", "cost_p10", "cost_p90"])?;
        for p in &c.curve {
            let mut row = vec![p.iteration.to_string()];
            for v in [p.rho.median, p.rho.p10, p.rho.p90, p.cost.median, p.cost.p10, p.cost.p90] {
                row.push(format_significant(v, 9));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

/// Robustness and energy of the optimal plan under `metric`.
pub fn evaluate_plan(plan: &WaypointPlan, scenario: &Scenario, metric: &MetricKind) -> Result<(f64, f64), ExperimentError> {
    let trace = plan.simulate(scenario)?;
    let rho = robustness_value(metric, &scenario.formula, &trace, 0.0)?;
    Ok((rho, input_energy(&trace)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_geometry() {
        let opt = analytic_optimum();
        assert!((opt.inter_goal - (2f64.sqrt() - 0.3)).abs() < 1e-12);
        assert!((opt.first_leg - (0.5f64.sqrt() - 0.15)).abs() < 1e-12);
        assert!((opt.cost - 2.01739).abs() < 1e-5, "{}", opt.cost);
        assert!((opt.plan.energy() - opt.cost).abs() < 1e-12);
        // One second is not enough to cross between the goals.
        assert!(opt.inter_goal > crate::dynamics::RobotSpec::case_study().u_max);
    }

    #[test]
    fn optimum_simulates() {
        let opt = analytic_optimum();
        let scenario = Scenario::case_study(Guidance::Strong);
        let (rho, cost) = evaluate_plan(&opt.plan, &scenario, &MetricKind::Traditional).unwrap();
        assert!(rho >= SUCCESS_RHO - 1e-6, "{rho}");
        assert!((cost - opt.cost).abs() / opt.cost < 0.01, "{cost}");
    }

    #[test]
    fn quantile_examples() {
        assert!(quantile(&[], 0.5).is_nan());
        assert_eq!(quantile(&[3.0], 0.1), 3.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert!((quantile(&[0.0, 10.0], 0.1) - 1.0).abs() < 1e-12);
        let q = Quantiles::of(&[5.0, f64::NAN, 1.0, 3.0]);
        assert_eq!((q.p10, q.median, q.p90), (1.4, 3.0, 4.6));
    }

    #[test]
    fn zero_iterations_never_succeed() {
        let mut plan = ExperimentPlan::new(
            vec![MetricKind::Traditional, MetricKind::Ag],
            vec![Guidance::None, Guidance::Strong],
            vec![0, 1],
        );
        plan.pi2.iterations = 0;
        let summary = run_casestudy(&plan).unwrap();
        assert_eq!(summary.configs.len(), 4);
        assert!(summary.configs.iter().all(|c| c.success_rate == 0.0 && c.curve.is_empty()));
        assert!(summary.configs[0].final_cost.median.is_nan());
        let dir = tempfile::tempdir().unwrap();
        let paths = export_curves(&summary, dir.path()).unwrap();
        let text = fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn short_sweep_is_consistent() {
        let mut plan = ExperimentPlan::new(vec![MetricKind::Traditional], vec![Guidance::Strong], vec![3, 4, 5]);
        plan.pi2.iterations = 30;
        let a = run_casestudy(&plan).unwrap();
        let b = run_casestudy(&plan).unwrap();
        let c = &a.configs[0];
        assert_eq!(c.runs.len(), 3);
        assert!((0.0..=1.0).contains(&c.success_rate));
        for (ra, rb) in c.runs.iter().zip(&b.configs[0].runs) {
            assert_eq!(ra.history, rb.history);
        }
        for p in &c.curve {
            if !p.rho.median.is_nan() {
                assert!(p.rho.p10 <= p.rho.median && p.rho.median <= p.rho.p90);
            }
        }
        assert!(plan_is_rejected_when_empty());
    }

    fn plan_is_rejected_when_empty() -> bool {
        run_casestudy(&ExperimentPlan::new(vec![], vec![Guidance::None], vec![0])).is_err()
    }
}
