//! Deterministic mean-field dynamics of the SIS chain.
//!
//! For a degree class `k` the expected one-step change of the infected
//! fraction, scaled by the population size `M`, is
//!
//! ```text
//! drift_k(x) = (1 − x(k)) ν k θ / D − x(k) δ
//! ```
//!
//! with `θ = θ^X = Σ_k P(k) x(k)` under non-monophilic adoption and
//! `θ = θ^Z = Σ_k Pr[d(Z) = k] x(k)` under monophilic adoption. The
//! recursion is `x ← x + w(k) drift_k(x) / M`, where the per-class weight
//! `w(k)` is the rate at which the Step-1 sampler picks class `k` relative to
//! uniform sampling. Setting the drift to zero gives
//! `x(k) = λ k θ / (λ k θ + D)` and the scalar fixed-point equation
//! `θ = H(θ)` solved by [`stationary_solve`].
//!
//! All vectors are indexed by degree class (see [`crate::graph::stats`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{expected_degree, JointDegreeStats, Sampler};
use crate::sis::{Rule, SisParams};

#[derive(Debug, Error)]
pub enum MeanFieldError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("state left [0,1] at step {step}: x[{class}] = {value}")]
    LeftUnitCube { step: u64, class: usize, value: f64 },
    #[error("fixed-point iteration at lambda = {lambda} did not converge in {iterations} iterations (last theta = {last_theta})")]
    NonConvergence {
        lambda: f64,
        last_theta: f64,
        iterations: usize,
    },
}

/// Which sampler-rate factor multiplies each class's drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightScheme {
    X,
    Y,
    /// `Pr[d(Z) = k] / P(k)`.
    Z,
    /// `Σ_{k'} (P(k) / P(k')) P(k | k')`, kept for comparison only: it does
    /// not reduce to the `Y` weights on degree-uncorrelated graphs.
    ZAsPrinted,
}

impl From<Sampler> for WeightScheme {
    fn from(s: Sampler) -> Self {
        match s {
            Sampler::X => WeightScheme::X,
            Sampler::Y => WeightScheme::Y,
            Sampler::Z => WeightScheme::Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step1Weights(Vec<f64>);

impl Step1Weights {
    pub fn new(stats: &JointDegreeStats, scheme: WeightScheme) -> Self {
        let dist = stats.distribution();
        let p = dist.probs();
        let c = stats.class_count();
        let w = match scheme {
            WeightScheme::X => vec![1.0; c],
            WeightScheme::Y => {
                let mean = dist.mean_degree();
                dist.degrees().iter().map(|&k| k as f64 / mean).collect()
            }
            WeightScheme::Z => stats.z_law().iter().zip(p).map(|(z, p)| z / p).collect(),
            WeightScheme::ZAsPrinted => (0..c)
                .map(|i| (0..c).map(|j| p[i] / p[j] * stats.conditional(i, j)).sum())
                .collect(),
        };
        Step1Weights(w)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Law of the observed agent's degree under `rule`: `P` or `Pr[d(Z) = ·]`.
pub fn observation_law(stats: &JointDegreeStats, rule: Rule) -> &[f64] {
    match rule {
        Rule::NonMonophilic => stats.distribution().probs(),
        Rule::Monophilic => stats.z_law(),
    }
}

/// Probability that an observed agent is infected: `θ^X` or `θ^Z`.
pub fn theta(x: &[f64], stats: &JointDegreeStats, rule: Rule) -> f64 {
    observation_law(stats, rule).iter().zip(x).map(|(w, v)| w * v).sum()
}

/// A population state with its scalar summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldState {
    pub x: Vec<f64>,
    pub theta_x: f64,
    pub theta_z: f64,
    /// Same quantity as `theta_x`.
    pub rho: f64,
}

impl MeanFieldState {
    pub fn new(x: Vec<f64>, stats: &JointDegreeStats) -> Self {
        let theta_x = theta(&x, stats, Rule::NonMonophilic);
        let theta_z = theta(&x, stats, Rule::Monophilic);
        MeanFieldState {
            x,
            theta_x,
            theta_z,
            rho: theta_x,
        }
    }
}

pub fn drift_into(x: &[f64], stats: &JointDegreeStats, params: &SisParams, rule: Rule, out: &mut [f64]) {
    let th = theta(x, stats, rule);
    let scale = params.nu() * th / params.max_degree() as f64;
    for ((o, &k), &xk) in out.iter_mut().zip(stats.degrees()).zip(x) {
        *o = (1.0 - xk) * scale * k as f64 - xk * params.delta();
    }
}

pub fn drift(x: &[f64], stats: &JointDegreeStats, params: &SisParams, rule: Rule) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    drift_into(x, stats, params, rule, &mut out);
    out
}

fn check_state(x: &[f64], classes: usize) -> Result<(), MeanFieldError> {
    if x.len() != classes {
        return Err(MeanFieldError::InvalidArgument(format!(
            "state has {} entries for {classes} degree classes",
            x.len()
        )));
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(MeanFieldError::InvalidArgument(format!(
            "state entry {v} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Stepper for `x ← x + w ⊙ drift(x) / M`.
#[derive(Debug, Clone)]
pub struct MeanFieldRecursion<'a> {
    stats: &'a JointDegreeStats,
    params: SisParams,
    rule: Rule,
    weights: Vec<f64>,
    step_size: f64,
    x: Vec<f64>,
    scratch: Vec<f64>,
    step: u64,
}

impl<'a> MeanFieldRecursion<'a> {
    pub fn new(
        x0: Vec<f64>,
        weights: &Step1Weights,
        stats: &'a JointDegreeStats,
        params: SisParams,
        rule: Rule,
        population: f64,
    ) -> Result<Self, MeanFieldError> {
        check_state(&x0, stats.class_count())?;
        if !(population > 0.0) {
            return Err(MeanFieldError::InvalidArgument(format!(
                "population scale {population} must be positive"
            )));
        }
        let c = x0.len();
        Ok(MeanFieldRecursion {
            stats,
            params,
            rule,
            weights: weights.values().to_vec(),
            step_size: 1.0 / population,
            x: x0,
            scratch: vec![0.0; c],
            step: 0,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Largest `|w(k) drift_k|` at the current state.
    pub fn residual(&mut self) -> f64 {
        drift_into(&self.x, self.stats, &self.params, self.rule, &mut self.scratch);
        self.scratch
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| (d * w).abs())
            .fold(0.0, f64::max)
    }

    pub fn step(&mut self) -> Result<(), MeanFieldError> {
        drift_into(&self.x, self.stats, &self.params, self.rule, &mut self.scratch);
        self.step += 1;
        for (class, ((x, d), w)) in self.x.iter_mut().zip(&self.scratch).zip(&self.weights).enumerate() {
            let next = *x + self.step_size * w * d;
            *x = if (0.0..=1.0).contains(&next) {
                next
            } else if next > -1e-12 && next < 1.0 + 1e-12 {
                next.clamp(0.0, 1.0)
            } else {
                return Err(MeanFieldError::LeftUnitCube {
                    step: self.step,
                    class,
                    value: next,
                });
            };
        }
        Ok(())
    }
}

/// Runs `steps` steps, recording step 0, every `record_every` steps and the
/// last step.
#[allow(clippy::too_many_arguments)]
pub fn iterate(
    x0: Vec<f64>,
    weights: &Step1Weights,
    stats: &JointDegreeStats,
    params: &SisParams,
    rule: Rule,
    population: f64,
    steps: u64,
    record_every: u64,
) -> Result<Vec<(u64, Vec<f64>)>, MeanFieldError> {
    if record_every == 0 {
        return Err(MeanFieldError::InvalidArgument("record_every must be positive".into()));
    }
    let mut rec = MeanFieldRecursion::new(x0, weights, stats, *params, rule, population)?;
    let mut out = vec![(0, rec.state().to_vec())];
    for n in 1..=steps {
        rec.step()?;
        if n % record_every == 0 || n == steps {
            out.push((n, rec.state().to_vec()));
        }
    }
    Ok(out)
}

/// Iterates until the weighted drift is at most `tol` in every class.
#[allow(clippy::too_many_arguments)]
pub fn iterate_to_fixed_point(
    x0: Vec<f64>,
    weights: &Step1Weights,
    stats: &JointDegreeStats,
    params: &SisParams,
    rule: Rule,
    population: f64,
    tol: f64,
    max_steps: u64,
) -> Result<(Vec<f64>, u64), MeanFieldError> {
    let mut rec = MeanFieldRecursion::new(x0, weights, stats, *params, rule, population)?;
    while rec.residual() > tol {
        if rec.steps_taken() >= max_steps {
            return Err(MeanFieldError::NonConvergence {
                lambda: params.lambda(),
                last_theta: theta(rec.state(), stats, rule),
                iterations: max_steps as usize,
            });
        }
        rec.step()?;
    }
    let n = rec.steps_taken();
    Ok((rec.x, n))
}

/// `λ* = D / E[d]`, with `d = d(X)` for non-monophilic and `d = d(Z)` for
/// monophilic adoption.
pub fn critical_threshold(stats: &JointDegreeStats, max_degree: usize, rule: Rule) -> f64 {
    max_degree as f64 / expected_degree(stats.distribution(), observation_law(stats, rule))
}

/// Stationary class state for a given `θ`: `λ k θ / (λ k θ + D)`.
pub fn stationary_state(theta: f64, lambda: f64, stats: &JointDegreeStats, max_degree: usize) -> Vec<f64> {
    let d = max_degree as f64;
    stats
        .degrees()
        .iter()
        .map(|&k| {
            let a = lambda * k as f64 * theta;
            a / (a + d)
        })
        .collect()
}

/// `H(θ) = Σ_k w(k) λ k θ / (λ k θ + D)` with `w` the observation law.
pub fn h_map(theta: f64, lambda: f64, stats: &JointDegreeStats, max_degree: usize, rule: Rule) -> f64 {
    let d = max_degree as f64;
    observation_law(stats, rule)
        .iter()
        .zip(stats.degrees())
        .map(|(w, &k)| {
            let a = lambda * k as f64 * theta;
            w * a / (a + d)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub theta0: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iters: 1_000_000,
            theta0: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    pub theta: f64,
    pub x: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
}

/// Solves `θ = H(θ)` by plain fixed-point iteration from `θ_0`.
///
/// When `λ E[d] / D ≤ 1 + 1e-9` the only fixed point is zero (`H` is concave
/// with `H(0) = 0`). The iteration is still run as a check: the solver
/// reports zero once the iterate drops below `10 tol`, or, if the budget runs
/// out first (the decay is only algebraic at the critical point), when every
/// iterate was nonincreasing.
pub fn stationary_solve(
    lambda: f64,
    stats: &JointDegreeStats,
    max_degree: usize,
    rule: Rule,
    opts: &SolverOptions,
) -> Result<StationarySolution, MeanFieldError> {
    if !(lambda > 0.0) || !(opts.tol > 0.0) {
        return Err(MeanFieldError::InvalidArgument(format!(
            "need lambda > 0 and tol > 0, got {lambda} and {}",
            opts.tol
        )));
    }
    if !(opts.theta0 > 0.0 && opts.theta0 <= 1.0) {
        return Err(MeanFieldError::InvalidArgument(format!(
            "theta0 = {} outside (0, 1]",
            opts.theta0
        )));
    }
    let h = |t: f64| h_map(t, lambda, stats, max_degree, rule);
    let slope = lambda / critical_threshold(stats, max_degree, rule);
    let zero = |iterations| StationarySolution {
        theta: 0.0,
        x: vec![0.0; stats.class_count()],
        rho: 0.0,
        iterations,
    };

    let mut t = opts.theta0;
    if slope <= 1.0 + 1e-9 {
        let mut monotone = true;
        for it in 1..=opts.max_iters {
            let next = h(t);
            monotone &= next <= t;
            t = next;
            if t < 10.0 * opts.tol {
                return Ok(zero(it));
            }
        }
        return if monotone {
            Ok(zero(opts.max_iters))
        } else {
            Err(MeanFieldError::NonConvergence {
                lambda,
                last_theta: t,
                iterations: opts.max_iters,
            })
        };
    }

    for it in 1..=opts.max_iters {
        let next = h(t);
        let step = (next - t).abs();
        t = next;
        if step <= opts.tol && (h(t) - t).abs() <= opts.tol {
            let x = stationary_state(t, lambda, stats, max_degree);
            let rho = stats.distribution().average(&x);
            return Ok(StationarySolution {
                theta: t,
                x,
                rho,
                iterations: it,
            });
        }
    }
    Err(MeanFieldError::NonConvergence {
        lambda,
        last_theta: t,
        iterations: opts.max_iters,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub lambda: f64,
    pub rho: f64,
}

/// Stationary `ρ*` over an increasing grid of `λ`.
pub fn rho_lambda_curve(
    stats: &JointDegreeStats,
    max_degree: usize,
    rule: Rule,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<CurvePoint>, MeanFieldError> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MeanFieldError::InvalidArgument("lambda grid must be increasing".into()));
    }
    grid.iter()
        .map(|&lambda| {
            stationary_solve(lambda, stats, max_degree, rule, opts).map(|s| CurvePoint { lambda, rho: s.rho })
        })
        .collect()
}
