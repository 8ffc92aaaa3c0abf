//! States, conserved quantities and the orbital-plane frame.
//!
//! Angular momentum carries the mass: `j = |J| = m |x × v|`. With that
//! convention the derived constants are `dθ/dt = j/(m r²)`, `R = k/j`,
//! `Λ = j²/(m k)` and `h = m k² (e² − 1) / (2 j²)`.

use crate::error::{HodoError, Result};
use crate::hodograph;
use crate::vector::{Rotation, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this eccentricity the velocity circle is treated as centred on the origin.
pub const EPS_DEGENERATE: f64 = 1e-12;

/// Relative threshold on `j / (m |x| |v|)` under which motion counts as radial.
pub const RADIAL_TOLERANCE: f64 = 1e-14;

/// Allowed out-of-plane offset of a position, relative to `|x|`.
pub const PLANE_TOLERANCE: f64 = 1e-9;

/// Mass of the particle and strength of the attractive `-k/|x|` potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub m: f64,
    pub k: f64,
}

impl SystemParams {
    pub fn new(m: f64, k: f64) -> Result<Self> {
        let p = SystemParams { m, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(HodoError::InvalidInput(format!("mass must be finite and > 0, got {}", self.m)));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(HodoError::InvalidInput(format!("force constant must be finite and > 0, got {}", self.k)));
        }
        Ok(())
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams { m: 1.0, k: 1.0 }
    }
}

/// Position, velocity and time tag of the particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: Vec3,
    pub v: Vec3,
    #[serde(default)]
    pub t: f64,
}

impl State {
    pub fn new(x: Vec3, v: Vec3) -> Result<Self> {
        Self::at_time(x, v, 0.0)
    }

    pub fn at_time(x: Vec3, v: Vec3, t: f64) -> Result<Self> {
        let s = State { x, v, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.v.is_finite() && self.t.is_finite()) {
            return Err(HodoError::InvalidInput("state has non-finite components".into()));
        }
        if self.x.norm() == 0.0 {
            return Err(HodoError::SingularPosition);
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.x.norm()
    }

    /// The same state rigidly rotated by `q`.
    pub fn rotated(&self, q: &Rotation) -> State {
        State { x: q.apply(self.x), v: q.apply(self.v), t: self.t }
    }
}

/// Angular momentum and energy of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conserved {
    #[serde(rename = "J")]
    pub angular_momentum: Vec3,
    pub j: f64,
    pub h: f64,
}

/// `J = x × (m v)`.
pub fn angular_momentum(s: &State, p: &SystemParams) -> Vec3 {
    s.x.cross(s.v * p.m)
}

/// Total energy `h = ½ m |v|² − k/|x|`.
pub fn energy(s: &State, p: &SystemParams) -> Result<f64> {
    let r = s.x.norm();
    if r == 0.0 {
        return Err(HodoError::SingularPosition);
    }
    Ok(0.5 * p.m * s.v.norm_squared() - p.k / r)
}

pub fn conserved(s: &State, p: &SystemParams) -> Result<Conserved> {
    let angular_momentum = angular_momentum(s, p);
    Ok(Conserved { angular_momentum, j: angular_momentum.norm(), h: energy(s, p)? })
}

/// Angular momentum vector and its length, rejecting (near-)radial motion.
pub(crate) fn nonradial_momentum(s: &State, p: &SystemParams) -> Result<(Vec3, f64)> {
    let big_j = angular_momentum(s, p);
    let j = big_j.norm();
    let scale = p.m * s.x.norm() * s.v.norm();
    if j == 0.0 || j <= RADIAL_TOLERANCE * scale {
        return Err(HodoError::DegenerateRadialMotion);
    }
    Ok((big_j, j))
}

/// Right-handed orthonormal frame of the orbital plane.
///
/// `e3` is along `J`; `e1` points to perihelion so that the velocity-circle
/// centre has frame coordinates `(0, |c|, 0)`. For a circular orbit `e1` is the
/// direction of the defining position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFrame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
}

impl PlaneFrame {
    pub const IDENTITY: PlaneFrame = PlaneFrame { e1: Vec3::X, e2: Vec3::Y, e3: Vec3::Z };

    /// World vector with frame coordinates `(a, b, c)`.
    pub fn to_world(&self, a: f64, b: f64, c: f64) -> Vec3 {
        self.e1 * a + self.e2 * b + self.e3 * c
    }

    /// Frame coordinates of a world vector.
    pub fn to_frame(&self, v: Vec3) -> Vec3 {
        Vec3::new(v.dot(self.e1), v.dot(self.e2), v.dot(self.e3))
    }

    pub fn rotated(&self, q: &Rotation) -> PlaneFrame {
        PlaneFrame { e1: q.apply(self.e1), e2: q.apply(self.e2), e3: q.apply(self.e3) }
    }

    /// Largest deviation from orthonormality and right-handedness.
    pub fn orthonormality_error(&self) -> f64 {
        let dots = [self.e1.dot(self.e2), self.e2.dot(self.e3), self.e1.dot(self.e3)];
        let norms = [self.e1.norm() - 1.0, self.e2.norm() - 1.0, self.e3.norm() - 1.0];
        let hand = self.e1.cross(self.e2).max_abs_diff(self.e3);
        dots.iter().chain(norms.iter()).fold(hand, |acc, d| acc.max(d.abs()))
    }
}

pub fn plane_frame(s: &State, p: &SystemParams) -> Result<PlaneFrame> {
    let (big_j, j) = nonradial_momentum(s, p)?;
    let e3 = big_j / j;
    let c = hodograph::center_from(s, p, e3, j);
    let radius = p.k / j;
    let e1 = if c.norm() > EPS_DEGENERATE * radius {
        c.normalized().cross(e3).normalized()
    } else {
        // circular orbit: no perihelion, anchor on the defining position
        (s.x - e3 * s.x.dot(e3)).normalized()
    };
    let e2 = e3.cross(e1);
    Ok(PlaneFrame { e1, e2, e3 })
}

/// Polar coordinates of a state in the orbital plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneCoords {
    pub r: f64,
    /// Principal value in `(−π, π]`, measured from `e1` positively about `e3`.
    pub theta: f64,
    /// `(v·e1, v·e2)`.
    pub v_plane: [f64; 2],
}

pub fn to_plane_coords(s: &State, f: &PlaneFrame) -> Result<PlaneCoords> {
    let r = s.x.norm();
    if r == 0.0 {
        return Err(HodoError::SingularPosition);
    }
    let offset = s.x.dot(f.e3);
    if offset.abs() > PLANE_TOLERANCE * r {
        return Err(HodoError::OutOfPlane { offset });
    }
    let mut theta = s.x.dot(f.e2).atan2(s.x.dot(f.e1));
    if theta <= -PI {
        theta = PI;
    }
    Ok(PlaneCoords { r, theta, v_plane: [s.v.dot(f.e1), s.v.dot(f.e2)] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> SystemParams {
        SystemParams::new(1.0, 1.0).unwrap()
    }

    fn st(x: [f64; 3], v: [f64; 3]) -> State {
        State::new(x.into(), v.into()).unwrap()
    }

    #[test]
    fn angular_momentum_examples() {
        assert_eq!(angular_momentum(&st([1., 0., 0.], [0., 2., 0.]), &unit()), Vec3::new(0., 0., 2.));
        assert_eq!(angular_momentum(&st([1., 0., 0.], [2., 0., 0.]), &unit()), Vec3::ZERO);
        // m (x1 v2 - x2 v1) = 2 (1 + 1)
        let p = SystemParams::new(2.0, 1.0).unwrap();
        let hand = p.m * (1.0 + 1.0);
        assert_eq!(angular_momentum(&st([1., 1., 0.], [-1., 1., 0.]), &p), Vec3::new(0., 0., hand));
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&st([1., 0., 0.], [0., 2., 0.]), &unit()).unwrap(), 1.0);
        assert_eq!(energy(&st([1., 0., 0.], [0., 1., 0.]), &unit()).unwrap(), -0.5);
        let far = st([1e6, 0., 0.], [0., 2f64.sqrt(), 0.]);
        assert!((energy(&far, &unit()).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn energy_rejects_origin() {
        let s = State { x: Vec3::ZERO, v: Vec3::X, t: 0.0 };
        assert_eq!(energy(&s, &unit()), Err(HodoError::SingularPosition));
        assert_eq!(State::new(Vec3::ZERO, Vec3::X), Err(HodoError::SingularPosition));
    }

    #[test]
    fn conserved_examples() {
        let c = conserved(&st([1., 0., 0.], [0., 2., 0.]), &unit()).unwrap();
        assert_eq!((c.angular_momentum, c.j, c.h), (Vec3::new(0., 0., 2.), 2.0, 1.0));
        let c = conserved(&st([1., 0., 0.], [0., 1., 0.]), &unit()).unwrap();
        assert_eq!((c.j, c.h), (1.0, -0.5));
        let c = conserved(&st([0., 0., 3.], [1., 0., 0.]), &unit()).unwrap();
        // z × x = +y; the right-hand rule gives (0, 3, 0)
        assert_eq!(c.angular_momentum, Vec3::new(0., 3., 0.));
        assert_eq!(c.j, 3.0);
        assert_relative_eq!(c.h, 0.5 - 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn params_are_validated() {
        assert!(SystemParams::new(0.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, -1.0).is_err());
        assert!(SystemParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn frame_canonical_hyperbola() {
        let f = plane_frame(&st([1., 0., 0.], [0., 2., 0.]), &unit()).unwrap();
        assert!(f.e1.max_abs_diff(Vec3::X) < 1e-15);
        assert!(f.e2.max_abs_diff(Vec3::Y) < 1e-15);
        assert!(f.e3.max_abs_diff(Vec3::Z) < 1e-15);
    }

    #[test]
    fn frame_circular_uses_position() {
        let f = plane_frame(&st([1., 0., 0.], [0., 1., 0.]), &unit()).unwrap();
        assert_eq!(f.e1, Vec3::X);
        assert_eq!(f.e3, Vec3::Z);
        let f = plane_frame(&st([0., 2., 0.], [-1. / 2f64.sqrt(), 0., 0.]), &unit()).unwrap();
        assert!(f.e1.max_abs_diff(Vec3::Y) < 1e-15);
    }

    #[test]
    fn frame_rejects_radial_motion() {
        let s = st([1., 0., 0.], [2., 0., 0.]);
        assert_eq!(plane_frame(&s, &unit()), Err(HodoError::DegenerateRadialMotion));
        let s = st([1., 0., 0.], [0., 0., 0.]);
        assert_eq!(plane_frame(&s, &unit()), Err(HodoError::DegenerateRadialMotion));
        let s = st([1., 0., 0.], [1., 1e-16, 0.]);
        assert_eq!(plane_frame(&s, &unit()), Err(HodoError::DegenerateRadialMotion));
    }

    #[test]
    fn frame_centre_on_e2_axis() {
        let p = SystemParams::new(1.7, 0.6).unwrap();
        let s = st([0.3, -1.2, 0.8], [0.4, 0.5, -0.2]);
        let f = plane_frame(&s, &p).unwrap();
        assert!(f.orthonormality_error() < 1e-12);
        let (_, j) = nonradial_momentum(&s, &p).unwrap();
        let c = f.to_frame(hodograph::center_from(&s, &p, f.e3, j));
        assert!(c.x.abs() < 1e-12 * c.norm() && c.z.abs() < 1e-12 * c.norm());
        assert!(c.y > 0.0);
    }

    #[test]
    fn plane_coords_examples() {
        let f = PlaneFrame::IDENTITY;
        let pc = to_plane_coords(&st([1., 0., 0.], [0., 1., 0.]), &f).unwrap();
        assert_eq!((pc.r, pc.theta), (1.0, 0.0));
        let pc = to_plane_coords(&st([0., 2., 0.], [0., 1., 0.]), &f).unwrap();
        assert_eq!(pc.r, 2.0);
        assert_relative_eq!(pc.theta, PI / 2.0);
        let pc = to_plane_coords(&st([-1., -0.0, 0.], [0., 1., 0.]), &f).unwrap();
        assert_eq!(pc.theta, PI);
    }

    #[test]
    fn plane_coords_canonical_at_perihelion() {
        let s = st([1., 0., 0.], [0., 2., 0.]);
        let f = plane_frame(&s, &unit()).unwrap();
        let pc = to_plane_coords(&s, &f).unwrap();
        assert_eq!(pc.theta, 0.0);
        assert_eq!(pc.v_plane, [0.0, 2.0]);
    }

    #[test]
    fn plane_coords_out_of_plane() {
        let s = st([1., 0., 0.1], [0., 1., 0.]);
        assert!(matches!(to_plane_coords(&s, &PlaneFrame::IDENTITY), Err(HodoError::OutOfPlane { .. })));
    }
}
