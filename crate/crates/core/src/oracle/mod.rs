//! Numerical ground truth: integrates Newton's equations for the `-k/|x|`
//! potential, extracts the polar angle and asymptotic velocities, and fits
//! circles to sampled velocities.

mod circle_fit;
mod rk45;

pub use circle_fit::{fit_circle, CircleFit, COLLINEAR_CONDITION};

use crate::dynamics::{self, to_plane_coords, PlaneFrame, State, SystemParams};
use crate::error::{HodoError, Result};
use crate::vector::Vec3;
use rk45::{initial_step, trial_step, Controller, Phase};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default radius factor (in units of Λ) at which an escaping orbit counts as asymptotic.
pub const ASYMPTOTIC_RADIUS_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Dormand–Prince 5(4) with adaptive steps.
    AdaptiveRk45,
    /// Fixed-step kick-drift-kick.
    Leapfrog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// First trial step for RK45 (0 picks one automatically); the fixed step for leapfrog.
    pub initial_step: f64,
    pub max_steps: usize,
    /// Abort when `r` drops below this; `None` means `1e-9 |x₀|`.
    pub min_radius_guard: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::AdaptiveRk45,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: 0.0,
            max_steps: 10_000_000,
            min_radius_guard: None,
        }
    }
}

impl IntegratorConfig {
    pub fn leapfrog(step: f64) -> Self {
        IntegratorConfig { method: Method::Leapfrog, initial_step: step, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(HodoError::InvalidInput("tolerances must be > 0".into()));
        }
        if self.max_steps == 0 {
            return Err(HodoError::InvalidInput("max_steps must be > 0".into()));
        }
        if self.method == Method::Leapfrog && !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(HodoError::InvalidInput("leapfrog needs a positive fixed step".into()));
        }
        Ok(())
    }
}

/// Samples of `(t, x, v)` in integration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<State>,
    pub params: SystemParams,
    pub config: IntegratorConfig,
}

impl Trajectory {
    pub fn first(&self) -> &State {
        &self.samples[0]
    }

    pub fn last(&self) -> &State {
        self.samples.last().expect("trajectory always holds the initial state")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &State> {
        self.samples.iter()
    }
}

/// `−(k/m) x / |x|³`.
pub fn accelerate(x: Vec3, p: &SystemParams) -> Result<Vec3> {
    let r = x.norm();
    if r == 0.0 {
        return Err(HodoError::SingularPosition);
    }
    Ok(x * (-(p.k / p.m) / (r * r * r)))
}

fn accel_unchecked(x: Vec3, p: &SystemParams) -> Vec3 {
    let r = x.norm();
    x * (-(p.k / p.m) / (r * r * r))
}

fn to_phase(s: &State) -> Phase {
    [s.x.x, s.x.y, s.x.z, s.v.x, s.v.y, s.v.z]
}

fn from_phase(y: &Phase, t: f64) -> State {
    State { x: Vec3::new(y[0], y[1], y[2]), v: Vec3::new(y[3], y[4], y[5]), t }
}

/// When to stop an integration.
#[derive(Debug, Clone, Copy)]
enum Stop {
    /// At the last target time.
    Time,
    /// Once `r >= radius` while moving outward in the integration direction.
    Radius { radius: f64, sign: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Record {
    /// Every accepted step, including the initial state.
    EveryStep,
    /// Only the states at the target times.
    Targets,
    /// Only the final state.
    LastOnly,
}

/// Core loop. `targets` are times the stepper lands on exactly, in integration order.
fn drive(
    s0: &State,
    p: &SystemParams,
    cfg: &IntegratorConfig,
    targets: &[f64],
    stop: Stop,
    record: Record,
) -> Result<Vec<State>> {
    s0.validate()?;
    p.validate()?;
    cfg.validate()?;
    let guard = cfg.min_radius_guard.unwrap_or(1e-9 * s0.radius());

    let sign = match (stop, targets.last()) {
        (Stop::Radius { sign, .. }, _) => sign,
        (Stop::Time, Some(&t_end)) if t_end < s0.t => -1.0,
        _ => 1.0,
    };
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(HodoError::InvalidInput("output times must be finite".into()));
    }
    if targets.windows(2).any(|w| (w[1] - w[0]) * sign < 0.0) {
        return Err(HodoError::InvalidInput("output times must be monotone".into()));
    }
    if targets.first().is_some_and(|&t| (t - s0.t) * sign < 0.0) {
        return Err(HodoError::InvalidInput("output times must not precede t0".into()));
    }

    let mut out = Vec::new();
    let mut next_target = 0;
    match record {
        Record::EveryStep | Record::LastOnly => out.push(*s0),
        Record::Targets => {}
    }
    while next_target < targets.len() && targets[next_target] == s0.t {
        if record == Record::Targets {
            out.push(*s0);
        }
        next_target += 1;
    }
    if matches!(stop, Stop::Time) && next_target >= targets.len() {
        return Ok(out);
    }

    let mut t = s0.t;
    let mut y = to_phase(s0);
    let deriv = |_t: f64, y: &Phase| -> Phase {
        let a = accel_unchecked(Vec3::new(y[0], y[1], y[2]), p);
        [y[3], y[4], y[5], a.x, a.y, a.z]
    };
    let mut dy = deriv(t, &y);
    let mut h = sign
        * match cfg.method {
            Method::Leapfrog => cfg.initial_step,
            _ if cfg.initial_step > 0.0 => cfg.initial_step,
            _ => initial_step(&y, &dy, cfg.rel_tol, cfg.abs_tol),
        };
    let mut controller = Controller::new();
    let mut steps = 0usize;

    loop {
        let target = targets.get(next_target).copied();
        let mut step = h;
        let mut lands = false;
        if let Some(tt) = target {
            let remaining = tt - t;
            if step.abs() >= remaining.abs() * (1.0 - 1e-12) {
                step = remaining;
                lands = true;
            }
        }

        steps += 1;
        if steps > cfg.max_steps {
            return Err(HodoError::StepLimitExceeded(cfg.max_steps));
        }

        let (y_new, dy_new) = match cfg.method {
            Method::AdaptiveRk45 => {
                let trial = trial_step(&deriv, t, &y, &dy, step, cfg.rel_tol, cfg.abs_tol);
                if !trial.error.is_finite() {
                    return Err(HodoError::NonFinite(t));
                }
                let factor = controller.factor(trial.error);
                if trial.error > 1.0 {
                    h = step * factor;
                    if h.abs() <= f64::EPSILON * t.abs().max(1.0) {
                        return Err(HodoError::NonFinite(t));
                    }
                    continue;
                }
                // a shortened landing step should not shrink the nominal step
                h = if lands { sign * h.abs().max(step.abs() * factor) } else { step * factor };
                (trial.y, trial.dy)
            }
            Method::Leapfrog => {
                let x0 = Vec3::new(y[0], y[1], y[2]);
                let v_half = Vec3::new(y[3], y[4], y[5]) + Vec3::new(dy[3], dy[4], dy[5]) * (0.5 * step);
                let x1 = x0 + v_half * step;
                let a1 = accel_unchecked(x1, p);
                let v1 = v_half + a1 * (0.5 * step);
                ([x1.x, x1.y, x1.z, v1.x, v1.y, v1.z], [v1.x, v1.y, v1.z, a1.x, a1.y, a1.z])
            }
        };
        if y_new.iter().chain(dy_new.iter()).any(|c| !c.is_finite()) {
            return Err(HodoError::NonFinite(t));
        }

        t = if lands { targets[next_target] } else { t + step };
        y = y_new;
        dy = dy_new;
        let state = from_phase(&y, t);
        if state.radius() < guard {
            return Err(HodoError::SingularPosition);
        }

        match record {
            Record::EveryStep => out.push(state),
            Record::LastOnly => out[0] = state,
            Record::Targets => {}
        }
        if lands {
            while next_target < targets.len() && targets[next_target] == t {
                if record == Record::Targets {
                    out.push(state);
                }
                next_target += 1;
            }
            if matches!(stop, Stop::Time) && next_target >= targets.len() {
                return Ok(out);
            }
        }
        if let Stop::Radius { radius, sign } = stop {
            if state.radius() >= radius && state.x.dot(state.v) * sign > 0.0 {
                if record == Record::Targets {
                    out.push(state);
                }
                return Ok(out);
            }
        }
    }
}

fn trajectory(samples: Vec<State>, p: &SystemParams, cfg: &IntegratorConfig) -> Trajectory {
    Trajectory { samples, params: *p, config: *cfg }
}

/// Integrates from `s0` to `t_final`, recording every accepted step.
///
/// `t_final < s0.t` integrates backward; `t_final == s0.t` returns just `s0`.
pub fn integrate(s0: &State, p: &SystemParams, t_final: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let samples = drive(s0, p, cfg, &[t_final], Stop::Time, Record::EveryStep)?;
    Ok(trajectory(samples, p, cfg))
}

/// Integrates through the monotone output grid `times`, recording only the grid states.
pub fn integrate_grid(s0: &State, p: &SystemParams, times: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(HodoError::InvalidInput("output grid is empty".into()));
    }
    let samples = drive(s0, p, cfg, times, Stop::Time, Record::Targets)?;
    Ok(trajectory(samples, p, cfg))
}

/// `n` equally spaced times from `t0` to `t_final` inclusive (`n = 1` gives just `t0`).
pub fn linspace_times(t0: f64, t_final: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => {
            (0..n).map(|i| if i == n - 1 { t_final } else { t0 + (t_final - t0) * i as f64 / (n - 1) as f64 }).collect()
        }
    }
}

/// Direction of integration in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    Forward,
    Backward,
}

impl TimeDirection {
    pub fn sign(self) -> f64 {
        match self {
            TimeDirection::Forward => 1.0,
            TimeDirection::Backward => -1.0,
        }
    }
}

/// Integrates until the particle is moving outward (in the integration
/// direction) at `r >= radius`, recording every accepted step.
pub fn integrate_until_radius(
    s0: &State,
    p: &SystemParams,
    radius: f64,
    direction: TimeDirection,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(HodoError::InvalidInput(format!("stop radius must be > 0, got {radius}")));
    }
    let stop = Stop::Radius { radius, sign: direction.sign() };
    let samples = drive(s0, p, cfg, &[], stop, Record::EveryStep)?;
    Ok(trajectory(samples, p, cfg))
}

/// Unwrapped polar angle along a trajectory, measured in frame `f`.
pub fn sweep_theta(traj: &Trajectory, f: &PlaneFrame) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(traj.len());
    let mut prev: Option<f64> = None;
    for s in traj.iter() {
        let raw = to_plane_coords(s, f)?.theta;
        let theta = match prev {
            None => raw,
            Some(last) => {
                let mut d = raw - last;
                d -= TAU * (d / TAU).round();
                last + d
            }
        };
        prev = Some(theta);
        out.push((s.t, theta));
    }
    Ok(out)
}

/// Unit velocity once the orbit has escaped to `r >= radius_factor · Λ`.
///
/// Forward returns the outgoing direction; backward returns the direction of
/// the physical (forward-time) velocity of the incoming particle.
pub fn asymptotic_direction(
    s0: &State,
    p: &SystemParams,
    direction: TimeDirection,
    radius_factor: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec3> {
    let h = dynamics::energy(s0, p)?;
    if !(h > 0.0) {
        return Err(HodoError::NotHyperbolic("h ≤ 0"));
    }
    let (_, j) = dynamics::nonradial_momentum(s0, p)?;
    let lambda = j * j / (p.m * p.k);
    let stop = Stop::Radius { radius: radius_factor * lambda, sign: direction.sign() };
    let last = drive(s0, p, cfg, &[], stop, Record::LastOnly)?;
    Ok(last[0].v.normalized())
}

/// Counterclockwise angle about `axis` from `−v_minus` to `v_plus`, in `[0, 2π)`;
/// for a hyperbolic orbit this is the numerically observed scattering angle.
pub fn observed_scattering_angle(v_minus: Vec3, v_plus: Vec3, axis: Vec3) -> f64 {
    crate::scattering::counterclockwise_angle(-v_minus, v_plus, axis)
}
