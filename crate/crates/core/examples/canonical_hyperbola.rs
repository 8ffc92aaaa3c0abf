//! The x = (1,0,0), v = (0,2,0) flyby with m = k = 1: every closed-form
//! quantity next to what the integrator measures.

use hodokit::oracle::observed_scattering_angle;
use hodokit::{
    analyze_scattering, asymptotic_direction, conic_from_state, IntegratorConfig, State, SystemParams, TimeDirection,
    Vec3,
};

fn main() -> hodokit::Result<()> {
    let p = SystemParams::new(1.0, 1.0)?;
    let s = State::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0))?;
    let orbit = conic_from_state(&s, &p)?;
    let sc = analyze_scattering(&s, &p)?;

    println!("class {:?}, e = {}, Lambda = {}", orbit.class, orbit.e, orbit.lambda);
    println!("theta*  = {:.7}", sc.theta_star);
    println!("theta0  = {:.7}", sc.theta_0);
    println!("Theta   = {:.7}  Psi = {:.7}", sc.arc_angle, sc.scattering_angle);
    println!("deflection = {:.7}", sc.deflection);
    println!("energy circle radius = {:.7}", sc.energy_radius);
    println!("v_in  = {:?}", sc.v_in);
    println!("v_out = {:?}", sc.v_out);

    let cfg = IntegratorConfig::default();
    let plus = asymptotic_direction(&s, &p, TimeDirection::Forward, 1e6, &cfg)?;
    let minus = asymptotic_direction(&s, &p, TimeDirection::Backward, 1e6, &cfg)?;
    let measured = observed_scattering_angle(minus, plus, Vec3::Z);
    println!("integrated Theta = {measured:.10} (diff {:.1e})", (measured - sc.arc_angle).abs());
    Ok(())
}
