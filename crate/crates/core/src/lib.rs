//! Velocity circles, conic orbits and hyperbolic scattering angles for the
//! Kepler problem, each cross-checked against a numerical integrator.
//!
//! Start from a [`State`] and [`SystemParams`]:
//!
//! ```
//! use hodokit::{analyze_scattering, velocity_circle, State, SystemParams, Vec3};
//!
//! let p = SystemParams::new(1.0, 1.0).unwrap();
//! let s = State::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0)).unwrap();
//! let circle = velocity_circle(&s, &p).unwrap();
//! assert_eq!(circle.radius, 0.5);
//! let sc = analyze_scattering(&s, &p).unwrap();
//! assert!((sc.arc_angle - sc.scattering_angle).abs() < 1e-12);
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hodograph;
pub mod oracle;
pub mod report;
pub mod scattering;
pub mod vector;
pub mod verify;

pub use dynamics::{
    angular_momentum, conserved, energy, plane_frame, to_plane_coords, Conserved, PlaneCoords, PlaneFrame, State,
    SystemParams,
};
pub use error::{HodoError, Result};
pub use hodograph::{
    classify, conic_from_state, eccentricity, radius_at, sample_hodograph, state_at, velocity_at, velocity_circle,
    ConicClass, ConicOrbit, HodographCircle,
};
pub use oracle::{
    accelerate, asymptotic_direction, fit_circle, integrate, integrate_grid, integrate_until_radius, sweep_theta,
    CircleFit, IntegratorConfig, Method, TimeDirection, Trajectory,
};
pub use scattering::{
    analyze_scattering, arc_angle, arc_endpoints, asymptotic_directions, energy_circle_radius, hyperbola_center,
    scattering_angle_from_conserved, theta_limits, HyperbolicScattering,
};
pub use vector::{Rotation, Vec3};
