//! Velocity circles for a circle, an ellipse and a hyperbola launched from the same point.
//!
//! Prints the centre, radius and eccentricity of each, then checks a few
//! points along the orbit against the circle.

use hodokit::{conic_from_state, velocity_at, velocity_circle, State, SystemParams, Vec3};

fn main() -> hodokit::Result<()> {
    let p = SystemParams::default();
    for speed in [1.0, 1.2, 2.0] {
        let s = State::new(Vec3::X, Vec3::new(0.0, speed, 0.0))?;
        let circle = velocity_circle(&s, &p)?;
        let orbit = conic_from_state(&s, &p)?;
        println!(
            "v0 = {speed}: {:?} c = ({:.4}, {:.4}) R = {:.4} e = {:.4}",
            orbit.class, circle.center.x, circle.center.y, circle.radius, orbit.e
        );
        let limit = if orbit.e >= 1.0 { 0.9 * (-1.0 / orbit.e).acos() } else { 3.0 };
        for theta in [-limit, 0.0, limit] {
            let v = velocity_at(&circle, &orbit, theta)?;
            let off = (v - circle.center).norm() - circle.radius;
            println!("    theta {theta:+.3}: v = ({:+.4}, {:+.4})  |v - c| - R = {off:.1e}", v.x, v.y);
        }
    }
    Ok(())
}
