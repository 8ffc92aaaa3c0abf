//! Algebraic (Kåsa) least-squares circle fit.

use crate::error::{HodoError, Result};
use serde::{Deserialize, Serialize};

/// Smallest accepted ratio of the eigenvalues of the centred scatter matrix.
pub const COLLINEAR_CONDITION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub center: [f64; 2],
    pub radius: f64,
    /// RMS of `|p − center| − radius` over the fitted points.
    pub rms_residual: f64,
}

/// Fits a circle by minimising `Σ (|p − center|² − radius²)²`.
///
/// The points are centred on their mean first, which decouples the constant
/// term and leaves a 2×2 system for the centre offset.
pub fn fit_circle(points: &[[f64; 2]]) -> Result<CircleFit> {
    let n = points.len();
    if n < 3 {
        return Err(HodoError::InvalidInput(format!("circle fit needs at least 3 points, got {n}")));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p[0]).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p[1]).sum::<f64>() / nf;

    let centred: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| {
            let (x, y) = (p[0] - mean_x, p[1] - mean_y);
            (x, y, x * x + y * y)
        })
        .collect();
    let mean_z = centred.iter().map(|c| c.2).sum::<f64>() / nf;

    let (mut sxx, mut sxy, mut syy, mut sxz, mut syz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, z) in &centred {
        let dz = z - mean_z;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxz += x * dz;
        syz += y * dz;
    }

    let det = sxx * syy - sxy * sxy;
    let half_trace = 0.5 * (sxx + syy);
    let lambda_max = half_trace + (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    if !(lambda_max > 0.0) || det / lambda_max < COLLINEAR_CONDITION * lambda_max {
        return Err(HodoError::DegenerateCollinear);
    }

    // 2a Sxx + 2b Sxy = Sxz, 2a Sxy + 2b Syy = Syz
    let a = 0.5 * (sxz * syy - syz * sxy) / det;
    let b = 0.5 * (syz * sxx - sxz * sxy) / det;
    let radius = (a * a + b * b + mean_z).sqrt();
    let center = [a + mean_x, b + mean_y];

    let sq = points
        .iter()
        .map(|p| {
            let d = (p[0] - center[0]).hypot(p[1] - center[1]) - radius;
            d * d
        })
        .sum::<f64>();
    Ok(CircleFit { center, radius, rms_residual: (sq / nf).sqrt() })
}
