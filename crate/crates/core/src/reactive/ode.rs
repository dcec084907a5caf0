use rand::Rng;

use crate::meanfield::drift_into;
use crate::sis::{Rule, SisParams};

use super::coupled::CoupledRecord;
use super::family::GraphFamily;
use super::kernel::transition_matrix;
use super::kernel::{KernelState, TransitionKernel};
use super::stationary::{stationary_distribution, stationary_residual};
use super::ReactiveError;

/// Monophilic drift `H(x, G_member)`.
pub fn drift_h(x: &[f64], family: &GraphFamily, member: usize, params: &SisParams) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    drift_into(x, family.stats(member), params, Rule::Monophilic, &mut out);
    out
}

fn check_inputs(x: &[f64], family: &GraphFamily, kernel: &dyn TransitionKernel) -> Result<(), ReactiveError> {
    if kernel.member_count() != family.len() {
        return Err(ReactiveError::InvalidArgument(format!(
            "kernel has {} members, family has {}",
            kernel.member_count(),
            family.len()
        )));
    }
    if x.len() != family.class_count() {
        return Err(ReactiveError::InvalidArgument(format!(
            "state has {} entries for {} degree classes",
            x.len(),
            family.class_count()
        )));
    }
    Ok(())
}

/// `(Σ_i π_x(i) H(x, G_i), π_x)`.
pub fn averaged_drift(
    x: &[f64],
    family: &GraphFamily,
    kernel: &dyn TransitionKernel,
    params: &SisParams,
) -> Result<(Vec<f64>, Vec<f64>), ReactiveError> {
    check_inputs(x, family, kernel)?;
    let state = KernelState {
        x,
        rho: family.distribution().average(x),
    };
    let pi = stationary_distribution(kernel, state)?;
    let mut total = vec![0.0; x.len()];
    let mut h = vec![0.0; x.len()];
    for (member, &weight) in pi.iter().enumerate() {
        drift_into(x, family.stats(member), params, Rule::Monophilic, &mut h);
        for (t, &v) in total.iter_mut().zip(&h) {
            assert!((-1.0..=1.0).contains(&v), "drift component {v} outside [-1, 1]");
            *t += weight * v;
        }
    }
    Ok((total, pi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdePoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub pi: Vec<f64>,
    /// `‖P_x' π − π‖_∞` of the recorded `π`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedTrajectory {
    pub step: f64,
    pub points: Vec<OdePoint>,
}

impl ConstrainedTrajectory {
    pub fn horizon(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.t)
    }
}

/// Explicit Euler for the averaged ODE with step `h` up to `horizon`.
///
/// Records `t = 0`, every `record_every` steps and the final step. Entries
/// that overshoot `[0, 1]` by less than `1e-12` are clamped. A failing
/// stationary solve is reported with the time and state at which it failed.
#[allow(clippy::too_many_arguments)]
pub fn integrate_constrained_ode(
    x0: &[f64],
    family: &GraphFamily,
    kernel: &dyn TransitionKernel,
    params: &SisParams,
    h: f64,
    horizon: f64,
    record_every: usize,
) -> Result<ConstrainedTrajectory, ReactiveError> {
    check_inputs(x0, family, kernel)?;
    if !(h > 0.0) || !(horizon >= 0.0) || record_every == 0 {
        return Err(ReactiveError::InvalidArgument(
            "need h > 0, horizon >= 0 and record_every > 0".into(),
        ));
    }
    if let Some(v) = x0.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(ReactiveError::InvalidArgument(format!(
            "initial entry {v} outside [0, 1]"
        )));
    }
    let steps = (horizon / h).round() as usize;
    let mut x = x0.to_vec();
    let mut points = Vec::with_capacity(steps / record_every + 2);

    for n in 0..=steps {
        let t = n as f64 * h;
        let (dx, pi) = averaged_drift(&x, family, kernel, params).map_err(|e| ReactiveError::AtTime {
            t,
            x: x.clone(),
            source: Box::new(e),
        })?;
        if n % record_every == 0 || n == steps {
            let state = KernelState {
                x: &x,
                rho: family.distribution().average(&x),
            };
            let residual = stationary_residual(&transition_matrix(kernel, state), &pi);
            points.push(OdePoint {
                t,
                x: x.clone(),
                pi,
                residual,
            });
        }
        if n == steps {
            break;
        }
        for (class, (xk, d)) in x.iter_mut().zip(&dx).enumerate() {
            let next = *xk + h * d;
            *xk = if (0.0..=1.0).contains(&next) {
                next
            } else if next > -1e-12 && next < 1.0 + 1e-12 {
                next.clamp(0.0, 1.0)
            } else {
                return Err(ReactiveError::LeftUnitCube {
                    t: t + h,
                    class,
                    value: next,
                });
            };
        }
    }
    Ok(ConstrainedTrajectory { step: h, points })
}

/// `max_t ‖x̄(t) − x(t)‖_∞` over the ODE record times.
///
/// Monte Carlo step `n` sits at time `n / population`; between records the
/// simulated state is held constant. Both paths must start at `t = 0` and
/// end within one ODE step (or one chain step) of each other.
pub fn deviation_report(
    coupled: &[CoupledRecord],
    ode: &ConstrainedTrajectory,
    population: usize,
) -> Result<f64, ReactiveError> {
    let (Some(first), Some(last)) = (coupled.first(), coupled.last()) else {
        return Err(ReactiveError::InvalidArgument("empty simulation record".into()));
    };
    if ode.points.is_empty() || first.step != 0 || ode.points[0].t != 0.0 {
        return Err(ReactiveError::InvalidArgument("both paths must start at t = 0".into()));
    }
    let m = population as f64;
    let mc_end = last.step as f64 / m;
    let slack = ode.step.max(1.0 / m) + 1e-9;
    if (mc_end - ode.horizon()).abs() > slack {
        return Err(ReactiveError::InvalidArgument(format!(
            "window mismatch: simulation ends at t = {mc_end}, ODE at t = {}",
            ode.horizon()
        )));
    }

    let mut worst: f64 = 0.0;
    for p in &ode.points {
        let n = (p.t * m + 1e-9).floor() as u64;
        let idx = coupled.partition_point(|r| r.step <= n) - 1;
        let gap = coupled[idx]
            .state
            .values()
            .iter()
            .zip(&p.x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// Largest `‖F(x) − F(y)‖_∞ / ‖x − y‖_∞` of the averaged drift over `pairs`
/// uniform random pairs in `[0, 1]^C`.
///
/// A non-finite or very large estimate points at a kernel that is not
/// Lipschitz, under which the ODE limit need not hold; it is logged as a
/// warning rather than rejected.
pub fn lipschitz_estimate<R: Rng + ?Sized>(
    family: &GraphFamily,
    kernel: &dyn TransitionKernel,
    params: &SisParams,
    pairs: usize,
    rng: &mut R,
) -> Result<f64, ReactiveError> {
    let c = family.class_count();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x: Vec<f64> = (0..c).map(|_| rng.gen()).collect();
        let y: Vec<f64> = (0..c).map(|_| rng.gen()).collect();
        let (fx, _) = averaged_drift(&x, family, kernel, params)?;
        let (fy, _) = averaged_drift(&y, family, kernel, params)?;
        let num = fx.iter().zip(&fy).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let den = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if den > 0.0 {
            worst = worst.max(num / den);
        }
    }
    if !worst.is_finite() || worst > 1e3 {
        log::warn!("averaged drift Lipschitz estimate {worst} is suspiciously large; check the kernel");
    }
    Ok(worst)
}
