//! Integrates an inclined ellipse for one period and writes the trajectory as CSV.
//!
//! `cargo run --example propagate_orbit > orbit.csv`

use hodokit::report::{csv_row, PROPAGATE_HEADER};
use hodokit::{conserved, integrate_grid, plane_frame, sweep_theta, IntegratorConfig, State, SystemParams, Vec3};
use std::f64::consts::TAU;

fn main() -> hodokit::Result<()> {
    let p = SystemParams::new(2.0, 3.0)?;
    let s = State::new(Vec3::new(1.0, 0.0, 0.5), Vec3::new(0.0, 1.1, 0.3))?;
    let c = conserved(&s, &p)?;
    let a = -p.k / (2.0 * c.h);
    let period = TAU * (p.m * a.powi(3) / p.k).sqrt();

    let times: Vec<f64> = (0..=200).map(|i| period * i as f64 / 200.0).collect();
    let tr = integrate_grid(&s, &p, &times, &IntegratorConfig::default())?;
    let frame = plane_frame(&s, &p)?;
    println!("{PROPAGATE_HEADER}");
    for (q, (_, theta)) in tr.iter().zip(sweep_theta(&tr, &frame)?) {
        let cq = conserved(q, &p)?;
        println!("{}", csv_row(&[q.t, q.x.x, q.x.y, q.x.z, q.v.x, q.v.y, q.v.z, q.radius(), theta, cq.j, cq.h]));
    }
    let end = tr.last();
    eprintln!("period {period:.6}, closure error {:.2e}", (end.x - s.x).norm());
    Ok(())
}
