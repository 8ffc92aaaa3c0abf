//! Energy error of the fixed-step leapfrog over many periods, next to the adaptive integrator.
//!
//! Leapfrog's error oscillates around the orbit and precesses with it, so the
//! worst error over a window levels off; the adaptive method's grows linearly.

use hodokit::{conserved, integrate_grid, IntegratorConfig, State, SystemParams, Vec3};
use std::f64::consts::TAU;

fn main() -> hodokit::Result<()> {
    let p = SystemParams::default();
    let e: f64 = 0.5;
    let s = State::new(Vec3::X, Vec3::new(0.0, (1.0 + e).sqrt(), 0.0))?;
    let period = TAU * (1.0 / (1.0 - e)).powf(1.5);
    let h0 = conserved(&s, &p)?.h;
    let per_period = 20;
    let times: Vec<f64> = (0..=1000 * per_period).map(|i| period * i as f64 / per_period as f64).collect();

    for (name, cfg) in [
        ("leapfrog T/1000", IntegratorConfig::leapfrog(period / 1000.0)),
        ("rk45 default", IntegratorConfig::default()),
    ] {
        let tr = integrate_grid(&s, &p, &times, &cfg)?;
        print!("{name:>16}:");
        let mut worst: f64 = 0.0;
        for (i, q) in tr.iter().enumerate() {
            worst = worst.max(((conserved(q, &p)?.h - h0) / h0).abs());
            let n = i / per_period;
            if i % per_period == 0 && [1, 10, 100, 1000].contains(&n) {
                print!("  max over {n:>4} periods {worst:.2e}");
            }
        }
        println!();
    }
    Ok(())
}
