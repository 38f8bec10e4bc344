use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generate::{random_case, DT};
use super::report::{PropertyId, PropertyReport, Worst};
use super::{eval_at, numeric_partial, one_sided_partials, LabError};
use crate::semantics::{eval_boolean, robustness_value, Metric};

/// Sample count and seed shared by all checks of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabConfig {
    pub samples: usize,
    pub seed: u64,
}

impl LabConfig {
    pub const DEFAULT_SEED: u64 = 0x5717_2020;
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { samples: 1000, seed: Self::DEFAULT_SEED }
    }
}

const MAX_OPERANDS: usize = 6;
const SMOOTH_STEPS: [f64; 2] = [1e-4, 1e-5];
const SMOOTH_TOL: f64 = 1e-3;
const CONTINUITY_STEP: f64 = 1e-9;

fn uniform_point<R: Rng + ?Sized>(rng: &mut R, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(lo..hi)).collect()
}

fn signed_magnitude<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..=hi);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

fn fmt_point(p: &[f64]) -> String {
    format!("{p:?}")
}

/// `∧(ρ,…,ρ) = ρ` and invariance under permutation, for `M ∈ 1..=6`,
/// `ρ ∈ [-5, 5]`.
pub fn check_idempotence_commutativity<R: Rng + ?Sized>(
    metric: &dyn Metric,
    n_samples: usize,
    rng: &mut R,
) -> Result<PropertyReport, LabError> {
    let mut worst = Worst::new();
    for _ in 0..n_samples {
        let m = rng.random_range(1..=MAX_OPERANDS);
        let rho = rng.random_range(-5.0..5.0);
        let equal = vec![rho; m];
        let v = eval_at(metric, &equal)?;
        worst.offer((v - rho).abs(), &equal, || format!("idempotence, value {v:e}"));

        let point = uniform_point(rng, m, -5.0, 5.0);
        let mut perm = point.clone();
        perm.shuffle(rng);
        let a = eval_at(metric, &point)?;
        let b = eval_at(metric, &perm)?;
        worst.offer((a - b).abs(), &point, || format!("permutation {}", fmt_point(&perm)));
    }
    Ok(PropertyReport::new(PropertyId::IdempotenceCommutativity, metric.name(), n_samples, 1e-9, worst))
}

/// `min ρ ≤ ∧(ρ) ≤ max ρ` on random points.
pub fn check_minmax_bounds<R: Rng + ?Sized>(
    metric: &dyn Metric,
    n_samples: usize,
    rng: &mut R,
) -> Result<PropertyReport, LabError> {
    let mut worst = Worst::new();
    for _ in 0..n_samples {
        let m = rng.random_range(1..=MAX_OPERANDS);
        let point = uniform_point(rng, m, -5.0, 5.0);
        let lo = point.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = point.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let v = eval_at(metric, &point)?;
        let excess = (lo - v).max(v - hi).max(0.0);
        worst.offer(excess, &point, || format!("value {v:e} outside [{lo:e}, {hi:e}]"));
    }
    Ok(PropertyReport::new(PropertyId::MinMaxBounds, metric.name(), n_samples, 1e-12, worst))
}

/// Positive scaling commutes with the conjunction, `∧(αρ) = α∧(ρ)`. The
/// error is taken relative to `α·max|ρ_i|`.
pub fn check_scale_invariance<R: Rng + ?Sized>(
    metric: &dyn Metric,
    n_samples: usize,
    rng: &mut R,
) -> Result<PropertyReport, LabError> {
    const ALPHAS: [f64; 5] = [1e-3, 0.1, 1.0, 10.0, 1e3];
    let mut worst = Worst::new();
    for _ in 0..n_samples {
        let m = rng.random_range(2..=MAX_OPERANDS);
        let point = uniform_point(rng, m, -5.0, 5.0);
        let scale = point.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
        let base = eval_at(metric, &point)?;
        for alpha in ALPHAS {
            let scaled: Vec<f64> = point.iter().map(|v| alpha * v).collect();
            let v = eval_at(metric, &scaled)?;
            let err = (v - alpha * base).abs() / (alpha * scale);
            worst.offer(err, &point, || format!("alpha {alpha:e}: {v:e} vs {:e}", alpha * base));
        }
    }
    Ok(PropertyReport::new(PropertyId::ScaleInvariance, metric.name(), n_samples, 1e-9, worst))
}

/// Partial derivatives at all-equal points `ρ ∈ ±[0.1, 5]` must be strictly
/// positive from both sides. Where the two sides agree the central estimate
/// must also equal `1/M` within `5e-4`.
pub fn check_shadow_lifting<R: Rng + ?Sized>(
    metric: &dyn Metric,
    n_samples: usize,
    rng: &mut R,
) -> Result<PropertyReport, LabError> {
    const MIN_SLOPE: f64 = 1e-6;
    let mut worst = Worst::new();
    for _ in 0..n_samples {
        let m = rng.random_range(2..=MAX_OPERANDS);
        let rho = signed_magnitude(rng, 0.1, 5.0);
        let point = vec![rho; m];
        let h = 1e-5 * rho.abs().max(1.0);
        for i in 0..m {
            let (left, right) = one_sided_partials(metric, &point, i, h)?;
            let deficit = (MIN_SLOPE - left.min(right)).max(0.0);
            worst.offer(deficit, &point, || format!("coordinate {i}: one-sided slopes {left:e}, {right:e}"));
            if (left - right).abs() <= SMOOTH_TOL {
                let c = numeric_partial(metric, &point, i, h)?;
                let miss = ((c - 1.0 / m as f64).abs() - 5e-4).max(0.0);
                worst.offer(miss, &point, || format!("coordinate {i}: partial {c:e}, expected 1/{m}"));
            }
        }
    }
    Ok(PropertyReport::new(PropertyId::ShadowLifting, metric.name(), n_samples, 0.0, worst))
}

/// Gap between one-sided slopes and the jump under a tiny perturbation,
/// maximized over coordinates and steps.
fn smoothness_gap(
    metric: &dyn Metric,
    point: &[f64],
    worst: &mut Worst,
    family: &str,
) -> Result<(), LabError> {
    let f0 = eval_at(metric, point)?;
    for i in 0..point.len() {
        for h in SMOOTH_STEPS {
            let (left, right) = one_sided_partials(metric, point, i, h)?;
            worst.offer((left - right).abs(), point, || {
                format!("{family}, coordinate {i}, h {h:e}: slopes {left:e} / {right:e}")
            });
        }
        for delta in [CONTINUITY_STEP, -CONTINUITY_STEP] {
            let mut p = point.to_vec();
            p[i] += delta;
            let jump = (eval_at(metric, &p)? - f0).abs();
            worst.offer(jump, point, || format!("{family}, coordinate {i}: jump {jump:e} under {delta:e}"));
        }
    }
    Ok(())
}

/// Left and right slopes at three families of points must agree within
/// `1e-3` for `h ∈ {1e-4, 1e-5}`, and the value must not jump under a
/// `1e-9` perturbation:
///
/// * random points whose minimum is unique by a gap of at least `0.1`;
/// * sign switches, a single zero minimum with the other terms above `0.2`;
/// * all-equal points `ρ ∈ ±[0.1, 5]`.
///
/// `n_samples` points are drawn per family.
pub fn check_weak_smoothness<R: Rng + ?Sized>(
    metric: &dyn Metric,
    n_samples: usize,
    rng: &mut R,
) -> Result<PropertyReport, LabError> {
    let mut worst = Worst::new();
    for _ in 0..n_samples {
        let m = rng.random_range(2..=MAX_OPERANDS);
        let point = loop {
            let p = uniform_point(rng, m, -5.0, 5.0);
            let mut sorted = p.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted[1] - sorted[0] >= 0.1 {
                break p;
            }
        };
        smoothness_gap(metric, &point, &mut worst, "unique minimum")?;
    }
    for _ in 0..n_samples {
        let m = rng.random_range(2..=MAX_OPERANDS);
        let mut point = uniform_point(rng, m, 0.2, 5.0);
        point[rng.random_range(0..m)] = 0.0;
        smoothness_gap(metric, &point, &mut worst, "sign switch")?;
    }
    for _ in 0..n_samples {
        let m = rng.random_range(2..=MAX_OPERANDS);
        let point = vec![signed_magnitude(rng, 0.1, 5.0); m];
        smoothness_gap(metric, &point, &mut worst, "all equal")?;
    }
    Ok(PropertyReport::new(PropertyId::WeakSmoothness, metric.name(), 3 * n_samples, SMOOTH_TOL, worst))
}

/// One-sided slope gap at the origin `(0, …, 0)` for `M ∈ 2..=6`. A metric
/// that is sound and idempotent cannot be smooth there, so this check is
/// expected to fail for every such metric.
pub fn check_origin_smoothness(metric: &dyn Metric) -> Result<PropertyReport, LabError> {
    let mut worst = Worst::new();
    let mut samples = 0;
    for m in 2..=MAX_OPERANDS {
        let point = vec![0.0; m];
        smoothness_gap(metric, &point, &mut worst, "origin")?;
        samples += 1;
    }
    Ok(PropertyReport::new(PropertyId::OriginSmoothness, metric.name(), samples, SMOOTH_TOL, worst))
}

/// Partial derivative with respect to a unique zero minimum, with the other
/// terms in `[0.2, 5]`, must equal one within `1e-3`.
pub fn check_boundary_derivative<R: Rng + ?Sized>(
    metric: &dyn Metric,
    n_samples: usize,
    rng: &mut R,
) -> Result<PropertyReport, LabError> {
    let mut worst = Worst::new();
    for _ in 0..n_samples {
        let m = rng.random_range(2..=MAX_OPERANDS);
        let mut point = uniform_point(rng, m, 0.2, 5.0);
        let i = rng.random_range(0..m);
        point[i] = 0.0;
        let c = numeric_partial(metric, &point, i, 1e-5)?;
        worst.offer((c - 1.0).abs(), &point, || format!("coordinate {i}: partial {c:e}"));
    }
    Ok(PropertyReport::new(PropertyId::BoundaryDerivative, metric.name(), n_samples, 1e-3, worst))
}

/// With `ρ_1 ∈ {-1, 0.5}` fixed and the other `M - 1` terms set to `10^k`,
/// `k = 2..=6`, the residual `|∧ - ρ_1|` must not increase with `k` and must
/// be below `1e-3` at `k = 6`.
pub fn check_limit_behavior(metric: &dyn Metric) -> Result<PropertyReport, LabError> {
    let mut worst = Worst::new();
    let mut samples = 0;
    for rho1 in [-1.0, 0.5] {
        for m in 2..=MAX_OPERANDS {
            let mut previous = f64::INFINITY;
            for k in 2..=6 {
                let mut point = vec![10f64.powi(k); m];
                point[0] = rho1;
                let residual = (eval_at(metric, &point)? - rho1).abs();
                samples += 1;
                let rise = (residual - previous).max(0.0);
                worst.offer(rise, &point, || format!("residual grew from {previous:e} to {residual:e}"));
                if k == 6 {
                    worst.offer(residual, &point, || format!("residual {residual:e} at k = 6"));
                }
                previous = residual;
            }
        }
    }
    Ok(PropertyReport::new(PropertyId::LimitBehavior, metric.name(), samples, 1e-3, worst))
}

/// `max_ρ ∧(-1, ρ) + 1` over a grid of `ρ ∈ [-1, 100]`, with its maximizer.
pub fn max_lift(metric: &dyn Metric) -> Result<(f64, f64), LabError> {
    let mut best = (f64::NEG_INFINITY, -1.0);
    for j in 0..=10_100 {
        let rho = -1.0 + j as f64 * 0.01;
        let lift = eval_at(metric, &[-1.0, rho])? + 1.0;
        if lift > best.0 {
            best = (lift, rho);
        }
    }
    Ok(best)
}

/// `∧(-1, ρ)` must rise above `-1` for some `ρ ∈ [-1, 100]` and be back
/// within half of that lift at `ρ = 100`. The violation is how far the
/// smaller of the lift and the drop falls short of `1e-6`.
pub fn check_non_monotone_lift(metric: &dyn Metric) -> Result<PropertyReport, LabError> {
    let (lift, at) = max_lift(metric)?;
    let end = eval_at(metric, &[-1.0, 100.0])? + 1.0;
    let drop = lift - end;
    let margin = lift.min(2.0 * drop - lift);
    let mut worst = Worst::new();
    worst.offer((1e-6 - margin).max(0.0), &[-1.0, at], || {
        format!("peak lift {lift:e} at rho {at}, {end:e} at rho 100")
    });
    Ok(PropertyReport::new(PropertyId::NonMonotoneLift, metric.name(), 10_101, 0.0, worst))
}

/// Partial derivative of `∧(ρ,…,ρ)` with `M` terms, by central difference
/// with step `1e-5·max(1, |ρ|)`.
pub fn equal_point_partial(metric: &dyn Metric, rho: f64, m: usize) -> Result<f64, LabError> {
    numeric_partial(metric, &vec![rho; m], 0, 1e-5 * rho.abs().max(1.0))
}

/// On random formula/trace pairs, wherever `|ρ| > 1e-6` the sign of the
/// robustness must match Boolean satisfaction. Each pair is evaluated at
/// every sample time its trace fully covers. The violation is the largest
/// `|ρ|` with the wrong sign.
pub fn check_soundness<R: Rng + ?Sized>(
    metric: &dyn Metric,
    n_formulas: usize,
    rng: &mut R,
) -> Result<PropertyReport, LabError> {
    let mut worst = Worst::new();
    for pair in 0..n_formulas {
        let (formula, trace) = random_case(rng);
        let needed = (formula.horizon() / DT).round() as usize;
        for k in 0..trace.len() - needed {
            let t = trace.time(k);
            let rho = robustness_value(metric, &formula, &trace, t)?;
            if rho.abs() <= 1e-6 {
                continue;
            }
            let sat = eval_boolean(&formula, &trace, t)?;
            if (rho > 0.0) != sat {
                worst.offer(rho.abs(), &[rho, t], || format!("pair {pair}: {formula} at t = {t}"));
            }
        }
    }
    Ok(PropertyReport::new(PropertyId::Soundness, metric.name(), n_formulas, 0.0, worst))
}

fn stream(config: &LabConfig, id: PropertyId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(id as u64);
    rng
}

/// All checks for one metric, each with its own random stream.
pub fn run_all_checks(metric: &dyn Metric, config: &LabConfig) -> Result<Vec<PropertyReport>, LabError> {
    let n = config.samples;
    let mut out = Vec::with_capacity(PropertyId::ALL.len());
    for id in PropertyId::ALL {
        let rng = &mut stream(config, id);
        out.push(match id {
            PropertyId::Soundness => check_soundness(metric, n, rng)?,
            PropertyId::IdempotenceCommutativity => check_idempotence_commutativity(metric, n, rng)?,
            PropertyId::WeakSmoothness => check_weak_smoothness(metric, n, rng)?,
            PropertyId::ShadowLifting => check_shadow_lifting(metric, n, rng)?,
            PropertyId::MinMaxBounds => check_minmax_bounds(metric, n, rng)?,
            PropertyId::ScaleInvariance => check_scale_invariance(metric, n, rng)?,
            PropertyId::OriginSmoothness => check_origin_smoothness(metric)?,
            PropertyId::BoundaryDerivative => check_boundary_derivative(metric, n, rng)?,
            PropertyId::LimitBehavior => check_limit_behavior(metric)?,
            PropertyId::NonMonotoneLift => check_non_monotone_lift(metric)?,
        });
    }
    Ok(out)
}
