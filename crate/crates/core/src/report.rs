//! Serializable reports and CSV formatting shared by the command-line tool.

use crate::dynamics::{conserved, Conserved, PlaneFrame, State, SystemParams};
use crate::error::Result;
use crate::hodograph::{conic_with_circle, velocity_circle, ConicClass};
use crate::scattering::{analyze_orbit, HyperbolicScattering};
use crate::vector::Vec3;
use serde::{Deserialize, Serialize};

pub const CONVENTION: &str =
    "j = |J| = m|x × v|; R = k/j; Lambda = j^2/(m k); h = m k^2 (e^2 - 1)/(2 j^2); reduces to the m-free forms at m = 1";

/// Header of the `propagate` CSV.
pub const PROPAGATE_HEADER: &str = "t,x,y,z,vx,vy,vz,r,theta,j,h";
/// Header of the `hodograph` CSV.
pub const HODOGRAPH_HEADER: &str = "theta,vx,vy";
/// Header of the `batch-scatter` CSV.
pub const BATCH_HEADER: &str = "h,j,e,Theta_formula,Theta_numeric,abs_err,status";

/// Full-precision float for CSV cells: 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(cells: &[f64]) -> String {
    cells.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    Rad,
    Deg,
}

impl AngleUnit {
    pub fn convert(self, radians: f64) -> f64 {
        match self {
            AngleUnit::Rad => radians,
            AngleUnit::Deg => radians.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub m: f64,
    pub k: f64,
    pub x: Vec3,
    pub v: Vec3,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HodographBlock {
    pub center: Vec3,
    pub radius: f64,
    pub eccentricity: f64,
    pub semi_latus_rectum: f64,
    pub class: ConicClass,
    pub frame: PlaneFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringBlock {
    pub theta_star: f64,
    pub theta_0: f64,
    #[serde(rename = "Theta")]
    pub arc_angle: f64,
    #[serde(rename = "Psi")]
    pub scattering_angle: f64,
    pub deflection: f64,
    pub v_in: Vec3,
    pub v_out: Vec3,
    pub d_in: Vec3,
    pub d_out: Vec3,
    pub energy_radius: f64,
    pub hyperbola_center: Vec3,
}

impl ScatteringBlock {
    pub fn new(sc: &HyperbolicScattering, unit: AngleUnit) -> Self {
        ScatteringBlock {
            theta_star: unit.convert(sc.theta_star),
            theta_0: unit.convert(sc.theta_0),
            arc_angle: unit.convert(sc.arc_angle),
            scattering_angle: unit.convert(sc.scattering_angle),
            deflection: unit.convert(sc.deflection),
            v_in: sc.v_in,
            v_out: sc.v_out,
            d_in: sc.d_in,
            d_out: sc.d_out,
            energy_radius: sc.energy_radius,
            hyperbola_center: sc.hyperbola_center,
        }
    }
}

/// Everything computable from one state; `scattering` is present exactly for hyperbolas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub inputs: Inputs,
    pub conserved: Conserved,
    pub hodograph: HodographBlock,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scattering: Option<ScatteringBlock>,
    pub angle_unit: AngleUnit,
    pub convention: String,
}

impl AnalysisReport {
    pub fn analyze(s: &State, p: &SystemParams, unit: AngleUnit) -> Result<Self> {
        p.validate()?;
        s.validate()?;
        let cons = conserved(s, p)?;
        let circle = velocity_circle(s, p)?;
        let orbit = conic_with_circle(s, p, &circle)?;
        let scattering = match orbit.class {
            ConicClass::Hyperbola => Some(ScatteringBlock::new(&analyze_orbit(&circle, &orbit)?, unit)),
            _ => None,
        };
        Ok(AnalysisReport {
            inputs: Inputs { m: p.m, k: p.k, x: s.x, v: s.v, t: s.t },
            conserved: cons,
            hodograph: HodographBlock {
                center: circle.center,
                radius: circle.radius,
                eccentricity: orbit.e,
                semi_latus_rectum: orbit.lambda,
                class: orbit.class,
                frame: orbit.frame,
            },
            scattering,
            angle_unit: unit,
            convention: CONVENTION.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Angles reported by the `scatter` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSummary {
    pub e: f64,
    pub theta_star: f64,
    pub theta_0: f64,
    #[serde(rename = "Theta")]
    pub arc_angle: f64,
    #[serde(rename = "Psi")]
    pub scattering_angle: f64,
    pub deflection: f64,
    pub angle_unit: AngleUnit,
}
