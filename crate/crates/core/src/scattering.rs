//! Hyperbolic motion: the velocity arc, its end points on the energy circle,
//! the asymptotic directions, and the two angles Θ (swept on the velocity
//! circle) and Ψ (between the asymptotes), which coincide.

use crate::dynamics::{State, SystemParams};
use crate::error::{HodoError, Result};
use crate::hodograph::{
    conic_with_circle, velocity_at, velocity_circle, ConicClass, ConicOrbit, HodographCircle, EPS_CLASSIFY,
};
use crate::vector::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicScattering {
    /// θ* = arccos(1/e)
    pub theta_star: f64,
    /// θ₀ = π − θ*, the asymptote angle
    pub theta_0: f64,
    /// Arc angle Θ on the velocity circle.
    #[serde(rename = "Theta")]
    pub arc_angle: f64,
    /// Scattering angle Ψ between the asymptotic directions.
    #[serde(rename = "Psi")]
    pub scattering_angle: f64,
    /// Θ − π, the usual deflection angle.
    pub deflection: f64,
    pub v_in: Vec3,
    pub v_out: Vec3,
    pub d_in: Vec3,
    pub d_out: Vec3,
    pub energy_radius: f64,
    pub hyperbola_center: Vec3,
}

fn require_hyperbolic_e(e: f64) -> Result<()> {
    if !(e > 1.0 + EPS_CLASSIFY) {
        return Err(HodoError::NotHyperbolic("e ≤ 1"));
    }
    Ok(())
}

fn require_hyperbolic_orbit(orbit: &ConicOrbit) -> Result<()> {
    if orbit.class != ConicClass::Hyperbola {
        return Err(if orbit.h <= 0.0 {
            HodoError::NotHyperbolic("h ≤ 0")
        } else {
            HodoError::NotHyperbolic("e ≤ 1")
        });
    }
    Ok(())
}

/// `(θ*, θ₀)` for eccentricity `e > 1`.
pub fn theta_limits(e: f64) -> Result<(f64, f64)> {
    require_hyperbolic_e(e)?;
    let theta_star = (1.0 / e).acos();
    Ok((theta_star, PI - theta_star))
}

/// `Θ = 2 (π − θ*)`, always in `(π, 2π)`.
pub fn arc_angle(e: f64) -> Result<f64> {
    let (theta_star, _) = theta_limits(e)?;
    Ok(2.0 * (PI - theta_star))
}

/// `e = sqrt(1 + 2 h j² / (m k²))`.
pub fn eccentricity_from_conserved(h: f64, j: f64, p: &SystemParams) -> f64 {
    (1.0 + 2.0 * h * j * j / (p.m * p.k * p.k)).max(0.0).sqrt()
}

/// `Ψ = 2 (π − arctan((j/k) sqrt(2h/m)))`, the closed form in terms of energy and angular momentum.
pub fn scattering_angle_from_conserved(h: f64, j: f64, p: &SystemParams) -> Result<f64> {
    if !(h > 0.0) {
        return Err(HodoError::NotHyperbolic("h ≤ 0"));
    }
    if !(j >= 0.0 && j.is_finite()) {
        return Err(HodoError::InvalidInput(format!("angular momentum must be ≥ 0, got {j}")));
    }
    Ok(2.0 * (PI - (j / p.k * (2.0 * h / p.m).sqrt()).atan()))
}

/// Radius `sqrt(2h/m)` of the energy circle: the speed at infinity.
pub fn energy_circle_radius(h: f64, p: &SystemParams) -> Result<f64> {
    if !(h > 0.0) {
        return Err(HodoError::NotHyperbolic("h ≤ 0"));
    }
    Ok((2.0 * h / p.m).sqrt())
}

/// Velocities at `−θ₀` (incoming) and `+θ₀` (outgoing), returned as `(v_in, v_out)`.
pub fn arc_endpoints(circle: &HodographCircle, orbit: &ConicOrbit) -> Result<(Vec3, Vec3)> {
    require_hyperbolic_orbit(orbit)?;
    let (_, theta_0) = theta_limits(orbit.e)?;
    Ok((velocity_at(circle, orbit, -theta_0)?, velocity_at(circle, orbit, theta_0)?))
}

/// Unit position directions along the incoming and outgoing asymptotes, `(d_in, d_out)`.
pub fn asymptotic_directions(orbit: &ConicOrbit) -> Result<(Vec3, Vec3)> {
    require_hyperbolic_orbit(orbit)?;
    let cos_star = 1.0 / orbit.e;
    let sin_star = (orbit.e - 1.0).sqrt() * (orbit.e + 1.0).sqrt() / orbit.e;
    let f = &orbit.frame;
    Ok((f.to_world(-cos_star, -sin_star, 0.0), f.to_world(-cos_star, sin_star, 0.0)))
}

/// Centre `C = a e e1` of the hyperbola, with semi-major axis `a = Λ/(e² − 1)`.
pub fn hyperbola_center(orbit: &ConicOrbit) -> Result<Vec3> {
    require_hyperbolic_orbit(orbit)?;
    let a = semi_major_axis(orbit);
    Ok(orbit.frame.e1 * (a * orbit.e))
}

/// `a = Λ/(e² − 1)` for a hyperbola.
pub fn semi_major_axis(orbit: &ConicOrbit) -> f64 {
    orbit.lambda / ((orbit.e - 1.0) * (orbit.e + 1.0))
}

/// Counterclockwise angle about `axis` carrying `from` onto `to`, in `[0, 2π)`.
pub fn counterclockwise_angle(from: Vec3, to: Vec3, axis: Vec3) -> f64 {
    let axis = axis.normalized();
    let sin = from.cross(to).dot(axis);
    let cos = from.dot(to);
    sin.atan2(cos).rem_euclid(TAU)
}

pub fn analyze_scattering(s: &State, p: &SystemParams) -> Result<HyperbolicScattering> {
    let circle = velocity_circle(s, p)?;
    let orbit = conic_with_circle(s, p, &circle)?;
    analyze_orbit(&circle, &orbit)
}

pub fn analyze_orbit(circle: &HodographCircle, orbit: &ConicOrbit) -> Result<HyperbolicScattering> {
    require_hyperbolic_orbit(orbit)?;
    let (theta_star, theta_0) = theta_limits(orbit.e)?;
    let arc = arc_angle(orbit.e)?;
    let (v_in, v_out) = arc_endpoints(circle, orbit)?;
    let (d_in, d_out) = asymptotic_directions(orbit)?;
    Ok(HyperbolicScattering {
        theta_star,
        theta_0,
        arc_angle: arc,
        scattering_angle: scattering_angle_from_conserved(orbit.h, orbit.j, &orbit.params)?,
        deflection: arc - PI,
        v_in,
        v_out,
        d_in,
        d_out,
        energy_radius: energy_circle_radius(orbit.h, &orbit.params)?,
        hyperbola_center: hyperbola_center(orbit)?,
    })
}
