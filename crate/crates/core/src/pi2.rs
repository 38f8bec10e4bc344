//! Guided PI², an episodic policy search over per-step feedforward inputs.
//!
//! Each iteration perturbs the current feedforward with Gaussian noise,
//! rolls out every sample under the guidance controller, scores it by input
//! energy plus a hinge penalty on the task robustness, and moves to the
//! softmax-weighted average of the samples.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::dynamics::{input_energy, simulate, DynamicsError, Scenario};
use crate::formula::Formula;
use crate::semantics::{robustness_value, EvalError, Metric};
use crate::trace::{format_significant, Trace};

#[derive(Debug, Error)]
pub enum Pi2Error {
    #[error("invalid PI2 configuration: {0}")]
    Config(String),
    #[error("non-finite cost {0}")]
    NonFiniteCost(f64),
    #[error("{0} samples but {1} costs")]
    Length(usize, usize),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Feedforward input `k_θ(t_k)` for every control step.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub theta: Vec<[f64; 2]>,
}

impl PolicyParams {
    pub fn zeros(steps: usize) -> Self {
        PolicyParams { theta: vec![[0.0, 0.0]; steps] }
    }

    pub fn steps(&self) -> usize {
        self.theta.len()
    }

    /// Rolls the policy out under the scenario's guidance.
    pub fn rollout(&self, scenario: &Scenario) -> Result<Trace, DynamicsError> {
        simulate(&scenario.robot, |k, _, _| self.theta.get(k).copied().unwrap_or([0.0, 0.0]), &scenario.guides)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Pi2Config {
    /// Rollouts per iteration.
    pub rollouts: usize,
    pub iterations: usize,
    /// Initial exploration standard deviation, m/s.
    pub sigma0: f64,
    pub sigma_decay: f64,
    /// Softmax sharpness of the update weights.
    pub h: f64,
    pub rho_target: f64,
    /// Penalty weight reached at the last iteration.
    pub w_max: f64,
    /// Steps between noise draws; `1` perturbs every step independently.
    pub noise_block: usize,
    pub noise_shape: NoiseShape,
    pub seed: u64,
}

/// How block noise varies between block boundaries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseShape {
    /// Constant over each block.
    #[default]
    Held,
    /// Linear between draws placed at block boundaries.
    Linear,
}

impl Default for Pi2Config {
    fn default() -> Self {
        Pi2Config {
            rollouts: 20,
            iterations: 120,
            sigma0: 0.05,
            sigma_decay: 0.99,
            h: 10.0,
            rho_target: 0.05,
            w_max: 100.0,
            noise_block: 1,
            noise_shape: NoiseShape::Held,
            seed: 0,
        }
    }
}

impl Pi2Config {
    pub fn validate(&self) -> Result<(), Pi2Error> {
        let bad = |m: &str| Err(Pi2Error::Config(m.to_string()));
        if self.rollouts < 2 {
            return bad("rollouts must be at least 2");
        }
        if self.noise_block == 0 {
            return bad("noise_block must be at least 1");
        }
        if !(self.sigma0 >= 0.0 && self.sigma0.is_finite()) {
            return bad("sigma0 must be non-negative");
        }
        if !(self.sigma_decay > 0.0 && self.sigma_decay <= 1.0) {
            return bad("sigma_decay must lie in (0, 1]");
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad("h must be positive");
        }
        if !(self.w_max >= 0.0 && self.w_max.is_finite() && self.rho_target.is_finite()) {
            return bad("w_max and rho_target must be finite, w_max non-negative");
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, Pi2Error> {
        let config: Pi2Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Exploration noise at iteration `k` (1-based).
    pub fn sigma(&self, k: usize) -> f64 {
        self.sigma0 * self.sigma_decay.powi(k as i32)
    }

    /// Penalty weight at iteration `k` (1-based); reaches `w_max` at `k = K`.
    pub fn penalty_weight(&self, k: usize) -> f64 {
        if self.iterations == 0 {
            return self.w_max;
        }
        self.w_max * k as f64 / self.iterations as f64
    }
}

/// Score of one rollout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    /// Penalized cost `J`.
    pub penalized: f64,
    /// Input energy `C`.
    pub cost: f64,
    pub rho: f64,
}

/// `J = C + w·max(0, ρ_target - ρ)` with `ρ` the robustness at time zero.
pub fn trajectory_cost(
    trace: &Trace,
    metric: &dyn Metric,
    formula: &Formula,
    w: f64,
    rho_target: f64,
) -> Result<Score, Pi2Error> {
    let rho = robustness_value(metric, formula, trace, 0.0)?;
    let cost = input_energy(trace)?;
    Ok(Score { penalized: cost + w * (rho_target - rho).max(0.0), cost, rho })
}

/// `n` perturbed copies of `theta`; the first copy is unperturbed.
pub fn sample_parameters<R: Rng + ?Sized>(theta: &PolicyParams, sigma: f64, n: usize, rng: &mut R) -> Vec<PolicyParams> {
    let normal = Normal::new(0.0, sigma.max(0.0)).expect("finite non-negative std");
    (0..n)
        .map(|i| {
            if i == 0 {
                return theta.clone();
            }
            let theta = theta
                .theta
                .iter()
                .map(|u| [u[0] + normal.sample(rng), u[1] + normal.sample(rng)])
                .collect();
            PolicyParams { theta }
        })
        .collect()
}

/// Like [`sample_parameters`], but noise is drawn once per `block` steps
/// and either held over the block or interpolated linearly to the next
/// draw, so neighbouring steps move together. `block = 1` is the
/// independent per-step case.
pub fn sample_block_parameters<R: Rng + ?Sized>(
    theta: &PolicyParams,
    sigma: f64,
    n: usize,
    block: usize,
    shape: NoiseShape,
    rng: &mut R,
) -> Vec<PolicyParams> {
    if block <= 1 {
        return sample_parameters(theta, sigma, n, rng);
    }
    let normal = Normal::new(0.0, sigma.max(0.0)).expect("finite non-negative std");
    let blocks = match shape {
        NoiseShape::Held => theta.steps().div_ceil(block),
        NoiseShape::Linear => theta.steps().saturating_sub(1).div_ceil(block) + 1,
    };
    (0..n)
        .map(|i| {
            if i == 0 {
                return theta.clone();
            }
            let noise: Vec<[f64; 2]> = (0..blocks).map(|_| [normal.sample(rng), normal.sample(rng)]).collect();
            let theta = theta
                .theta
                .iter()
                .enumerate()
                .map(|(k, u)| {
                    let e = match shape {
                        NoiseShape::Held => noise[k / block],
                        NoiseShape::Linear => {
                            let (a, b) = (noise[k / block], noise[(k / block + 1).min(blocks - 1)]);
                            let s = (k % block) as f64 / block as f64;
                            [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
                        }
                    };
                    [u[0] + e[0], u[1] + e[1]]
                })
                .collect();
            PolicyParams { theta }
        })
        .collect()
}

/// `Σ P_i θ_i` with `P_i ∝ exp(-h (J_i - J_min) / (J_max - J_min + 1e-12))`.
pub fn pi2_update(samples: &[PolicyParams], costs: &[f64], h: f64) -> Result<PolicyParams, Pi2Error> {
    if samples.len() != costs.len() || samples.is_empty() {
        return Err(Pi2Error::Length(samples.len(), costs.len()));
    }
    if let Some(bad) = costs.iter().find(|c| !c.is_finite()) {
        return Err(Pi2Error::NonFiniteCost(*bad));
    }
    let lo = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = costs.iter().map(|c| (-h * (c - lo) / (hi - lo + 1e-12)).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut theta = vec![[0.0, 0.0]; samples[0].steps()];
    for (sample, w) in samples.iter().zip(&weights) {
        let p = w / total;
        for (acc, u) in theta.iter_mut().zip(&sample.theta) {
            acc[0] += p * u[0];
            acc[1] += p * u[1];
        }
    }
    Ok(PolicyParams { theta })
}

/// Noiseless evaluation recorded at one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub rho: f64,
    pub cost: f64,
    pub penalized: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningHistory {
    pub records: Vec<IterationRecord>,
    /// Parameters after the last update.
    pub params: PolicyParams,
}

impl LearningHistory {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// First iteration whose noiseless rollout met the robustness target.
    pub fn first_success(&self) -> Option<usize> {
        self.records.iter().find(|r| r.success).map(|r| r.iteration)
    }

    /// CSV with columns iteration, rho, cost, J, success.
    pub fn write_csv(&self, out: impl Write) -> Result<(), Pi2Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "rho", "cost", "J", "success"])?;
        for r in &self.records {
            w.write_record([
                r.iteration.to_string(),
                format_significant(r.rho, 9),
                format_significant(r.cost, 9),
                format_significant(r.penalized, 9),
                r.success.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), Pi2Error> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Runs `K` iterations from a zero feedforward.
///
/// At iteration `k` the noise level is `σ_0·decay^k` and the penalty weight
/// `w_max·k/K`. The unperturbed first sample is recorded as the iteration's
/// evaluation before the update.
pub fn run_pi2(
    config: &Pi2Config,
    scenario: &Scenario,
    metric: &dyn Metric,
    formula: &Formula,
) -> Result<LearningHistory, Pi2Error> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = PolicyParams::zeros(scenario.robot.steps());
    let mut records = Vec::with_capacity(config.iterations);
    for k in 1..=config.iterations {
        let w = config.penalty_weight(k);
        let samples =
            sample_block_parameters(&params, config.sigma(k), config.rollouts, config.noise_block, config.noise_shape, &mut rng);
        let scores = samples
            .par_iter()
            .map(|p| {
                let trace = p.rollout(scenario)?;
                trajectory_cost(&trace, metric, formula, w, config.rho_target)
            })
            .collect::<Result<Vec<_>, Pi2Error>>()?;
        let eval = scores[0];
        records.push(IterationRecord {
            iteration: k,
            rho: eval.rho,
            cost: eval.cost,
            penalized: eval.penalized,
            success: eval.rho >= config.rho_target,
        });
        let costs: Vec<f64> = scores.iter().map(|s| s.penalized).collect();
        params = pi2_update(&samples, &costs, config.h)?;
    }
    Ok(LearningHistory { records, params })
}
