//! Recovers the velocity circle from integrated velocities alone.
//!
//! The fit knows nothing about the force law; its centre and radius are compared
//! with c = v - R (J x x)/(|J| |x|) and R = k/j.

use hodokit::{fit_circle, integrate, plane_frame, velocity_circle, IntegratorConfig, State, SystemParams, Vec3};

fn main() -> hodokit::Result<()> {
    let p = SystemParams::new(0.8, 1.5)?;
    let s = State::new(Vec3::new(0.7, -0.4, 0.2), Vec3::new(0.5, 1.4, -0.3))?;
    let frame = plane_frame(&s, &p)?;
    let tr = integrate(&s, &p, 25.0, &IntegratorConfig::default())?;
    let pts: Vec<[f64; 2]> = tr.iter().map(|q| [q.v.dot(frame.e1), q.v.dot(frame.e2)]).collect();
    let fit = fit_circle(&pts)?;

    let circle = velocity_circle(&s, &p)?;
    let c = [circle.center.dot(frame.e1), circle.center.dot(frame.e2)];
    println!("{} velocity samples", pts.len());
    println!("fit:    c = ({:.10}, {:.10}) R = {:.10}", fit.center[0], fit.center[1], fit.radius);
    println!("theory: c = ({:.10}, {:.10}) R = {:.10}", c[0], c[1], circle.radius);
    println!("rms residual {:.2e}", fit.rms_residual);
    Ok(())
}
