//! Runs the built-in property suite and prints one line per check.
//!
//! `cargo run --release --example verify_suite -- [seed] [cases]`

use hodokit::verify::{run_suite, SuiteConfig};
use std::time::Instant;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let cases = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let started = Instant::now();
    let report = run_suite(&SuiteConfig { seed, cases, tolerance: None });
    print!("{}", report.to_text());
    println!("elapsed {:.2?}", started.elapsed());
}
