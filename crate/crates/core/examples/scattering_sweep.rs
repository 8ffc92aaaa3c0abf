//! Arc angle, scattering angle and deflection across impact parameters at fixed energy.

use hodokit::scattering::eccentricity_from_conserved;
use hodokit::{arc_angle, scattering_angle_from_conserved, SystemParams};
use std::f64::consts::PI;

fn main() -> hodokit::Result<()> {
    let p = SystemParams::default();
    let h = 0.5;
    let speed = (2.0 * h / p.m).sqrt();
    println!("{:>8} {:>8} {:>10} {:>10} {:>10}", "b", "e", "Theta", "Psi", "deflect");
    for b in [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0] {
        // impact parameter b at infinity gives j = m b v_inf
        let j = p.m * b * speed;
        let e = eccentricity_from_conserved(h, j, &p);
        let theta = arc_angle(e)?;
        let psi = scattering_angle_from_conserved(h, j, &p)?;
        println!("{b:>8.2} {e:>8.3} {theta:>10.6} {psi:>10.6} {:>10.6}", theta - PI);
    }
    Ok(())
}
