//! The velocity circle and the conic orbit recovered from a single state.
//!
//! Along a Kepler orbit the velocity satisfies `v(θ) − c = R (ĵ × r̂)`, so a
//! single state fixes the centre `c = v − R (ĵ × x̂)` with `R = k/j`. In the
//! perihelion frame this reads `v(θ) = (−R sin θ, R (e + cos θ), 0)` and the
//! orbit is `r(θ) = Λ / (1 + e cos θ)`.

use crate::dynamics::{
    self, nonradial_momentum, plane_frame, to_plane_coords, PlaneFrame, State, SystemParams, EPS_DEGENERATE,
};
use crate::error::{HodoError, Result};
use crate::vector::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Half-width of the parabola band around `e = 1`.
pub const EPS_CLASSIFY: f64 = 1e-9;

/// Smallest admissible `1 + e cos θ` for [`radius_at`].
pub const BRANCH_TOLERANCE: f64 = 1e-12;

/// Distance kept from the asymptotes when sampling an open branch.
pub const SAMPLE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConicClass {
    Circle,
    Ellipse,
    Parabola,
    Hyperbola,
}

impl ConicClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ConicClass::Circle => "circle",
            ConicClass::Ellipse => "ellipse",
            ConicClass::Parabola => "parabola",
            ConicClass::Hyperbola => "hyperbola",
        }
    }

    /// Bound orbits sweep the whole velocity circle.
    pub fn is_closed(self) -> bool {
        matches!(self, ConicClass::Circle | ConicClass::Ellipse)
    }
}

/// The hodograph: velocities lie on the circle `|v − center| = radius`,
/// traversed counterclockwise about `frame.e3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HodographCircle {
    pub center: Vec3,
    pub radius: f64,
    pub frame: PlaneFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicOrbit {
    pub e: f64,
    /// Semi-latus rectum Λ.
    pub lambda: f64,
    pub class: ConicClass,
    pub frame: PlaneFrame,
    pub params: SystemParams,
    pub j: f64,
    pub h: f64,
}

impl ConicOrbit {
    pub fn perihelion_radius(&self) -> f64 {
        self.lambda / (1.0 + self.e)
    }

    /// Largest `|θ|` reachable on an open orbit, `arccos(−1/e)`; `None` for `e < 1`.
    pub fn branch_limit(&self) -> Option<f64> {
        branch_limit(self.e)
    }
}

fn branch_limit(e: f64) -> Option<f64> {
    (e >= 1.0).then(|| (-1.0 / e).acos())
}

/// `c = v − (k/j) (ĵ × x̂)` given the unit angular momentum `jhat` and `j`.
pub(crate) fn center_from(s: &State, p: &SystemParams, jhat: Vec3, j: f64) -> Vec3 {
    let radius = p.k / j;
    s.v - jhat.cross(s.x.normalized()) * radius
}

pub fn velocity_circle(s: &State, p: &SystemParams) -> Result<HodographCircle> {
    let (big_j, j) = nonradial_momentum(s, p)?;
    let frame = plane_frame(s, p)?;
    let center = center_from(s, p, big_j / j, j);
    Ok(HodographCircle { center, radius: p.k / j, frame })
}

/// `e = |c| / R`.
pub fn eccentricity(circle: &HodographCircle) -> f64 {
    circle.center.norm() / circle.radius
}

pub fn classify(e: f64) -> ConicClass {
    if e <= EPS_DEGENERATE {
        ConicClass::Circle
    } else if e < 1.0 - EPS_CLASSIFY {
        ConicClass::Ellipse
    } else if (e - 1.0).abs() <= EPS_CLASSIFY {
        ConicClass::Parabola
    } else {
        ConicClass::Hyperbola
    }
}

pub fn conic_from_state(s: &State, p: &SystemParams) -> Result<ConicOrbit> {
    let circle = velocity_circle(s, p)?;
    conic_with_circle(s, p, &circle)
}

pub(crate) fn conic_with_circle(s: &State, p: &SystemParams, circle: &HodographCircle) -> Result<ConicOrbit> {
    let conserved = dynamics::conserved(s, p)?;
    let e = eccentricity(circle);
    Ok(ConicOrbit {
        e,
        lambda: conserved.j * conserved.j / (p.m * p.k),
        class: classify(e),
        frame: circle.frame,
        params: *p,
        j: conserved.j,
        h: conserved.h,
    })
}

/// `r(θ) = Λ / (1 + e cos θ)`.
pub fn radius_at(orbit: &ConicOrbit, theta: f64) -> Result<f64> {
    let denominator = 1.0 + orbit.e * theta.cos();
    if denominator <= BRANCH_TOLERANCE {
        return Err(HodoError::OutsideBranch { theta, denominator });
    }
    Ok(orbit.lambda / denominator)
}

/// Velocity at polar angle `θ`; endpoints `±θ₀` of an open branch are allowed.
pub fn velocity_at(circle: &HodographCircle, orbit: &ConicOrbit, theta: f64) -> Result<Vec3> {
    if let Some(limit) = orbit.branch_limit() {
        if theta.abs() > limit {
            return Err(HodoError::OutsideBranch { theta, denominator: 1.0 + orbit.e * theta.cos() });
        }
    }
    let r = circle.radius;
    let (sin, cos) = theta.sin_cos();
    Ok(orbit.frame.to_world(-r * sin, r * (orbit.e + cos), 0.0))
}

/// Full state at polar angle `θ`, with `t` left at zero.
pub fn state_at(circle: &HodographCircle, orbit: &ConicOrbit, theta: f64) -> Result<State> {
    let r = radius_at(orbit, theta)?;
    let v = velocity_at(circle, orbit, theta)?;
    let (sin, cos) = theta.sin_cos();
    State::new(orbit.frame.to_world(r * cos, r * sin, 0.0), v)
}

/// `n` velocities at equally spaced angles: `[0, 2π)` for bound orbits,
/// `[−θ₀ + δ, θ₀ − δ]` with `δ` = [`SAMPLE_MARGIN`] for open ones.
pub fn sample_hodograph(circle: &HodographCircle, orbit: &ConicOrbit, n: usize) -> Result<Vec<(f64, Vec3)>> {
    if n < 2 {
        return Err(HodoError::InvalidInput(format!("need at least 2 samples, got {n}")));
    }
    let thetas: Vec<f64> = if orbit.class.is_closed() {
        (0..n).map(|i| TAU * i as f64 / n as f64).collect()
    } else {
        let limit = (-1.0 / orbit.e).max(-1.0).acos() - SAMPLE_MARGIN;
        let step = 2.0 * limit / (n - 1) as f64;
        (0..n).map(|i| if i == n - 1 { limit } else { -limit + step * i as f64 }).collect()
    };
    thetas.into_iter().map(|th| Ok((th, velocity_at(circle, orbit, th)?))).collect()
}

/// Polar angle of a state in the orbit's own frame.
pub fn true_anomaly(s: &State, orbit: &ConicOrbit) -> Result<f64> {
    Ok(to_plane_coords(s, &orbit.frame)?.theta)
}
