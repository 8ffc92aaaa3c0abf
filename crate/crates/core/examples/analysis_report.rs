//! Builds the same JSON report as `hodokit analyze`, in degrees, and reads it back.

use hodokit::report::{AnalysisReport, AngleUnit};
use hodokit::{State, SystemParams, Vec3};

fn main() -> hodokit::Result<()> {
    let p = SystemParams::new(1.0, 1.0)?;
    let s = State::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0))?;
    let report = AnalysisReport::analyze(&s, &p, AngleUnit::Deg)?;
    let json = report.to_json();
    print!("{json}");

    let back: AnalysisReport = serde_json::from_str(&json).expect("report parses");
    assert_eq!(back, report);
    Ok(())
}
