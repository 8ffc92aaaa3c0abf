//! Dormand–Prince 5(4) embedded pair with proportional-integral step control.

/// Phase-space point `(x, v)` flattened for the stepper.
pub(crate) type Phase = [f64; 6];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus the embedded fourth-order ones
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

fn axpy(y: &Phase, terms: &[(f64, &Phase)]) -> Phase {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        for (c, k) in terms {
            *o += c * k[i];
        }
    }
    out
}

/// Result of one trial step.
pub(crate) struct Trial {
    pub y: Phase,
    /// Derivative at the new point (first-same-as-last).
    pub dy: Phase,
    /// Scaled RMS error estimate; the step is acceptable when `<= 1`.
    pub error: f64,
}

pub(crate) fn trial_step<F>(f: &F, t: f64, y: &Phase, k1: &Phase, h: f64, rtol: f64, atol: f64) -> Trial
where
    F: Fn(f64, &Phase) -> Phase,
{
    let k2 = f(t + C2 * h, &axpy(y, &[(h * A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, &[(h * A31, k1), (h * A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]));
    let k5 = f(t + C5 * h, &axpy(y, &[(h * A51, k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]));
    let k6 = f(t + h, &axpy(y, &[(h * A61, k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]));
    let y_new = axpy(y, &[(h * A71, k1), (h * A73, &k3), (h * A74, &k4), (h * A75, &k5), (h * A76, &k6)]);
    let k7 = f(t + h, &y_new);

    let mut sum = 0.0;
    for i in 0..6 {
        let err = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = atol + rtol * y[i].abs().max(y_new[i].abs());
        sum += (err / scale).powi(2);
    }
    Trial { y: y_new, dy: k7, error: (sum / 6.0).sqrt() }
}

/// Step-size controller state (the previous accepted error).
pub(crate) struct Controller {
    prev_error: f64,
    rejected_last: bool,
}

impl Controller {
    pub fn new() -> Self {
        Controller { prev_error: 1e-4, rejected_last: false }
    }

    /// Factor by which to scale the step after a trial with scaled error `error`.
    pub fn factor(&mut self, error: f64) -> f64 {
        if error <= 1.0 {
            let err = error.max(1e-10);
            let mut fac = SAFETY * err.powf(-ALPHA) * self.prev_error.powf(BETA);
            fac = fac.clamp(MIN_FACTOR, MAX_FACTOR);
            if self.rejected_last {
                fac = fac.min(1.0);
            }
            self.prev_error = err;
            self.rejected_last = false;
            fac
        } else {
            self.rejected_last = true;
            (SAFETY * error.powf(-0.2)).max(MIN_FACTOR)
        }
    }
}

/// Initial step from the ratio of state to derivative magnitudes.
pub(crate) fn initial_step(y: &Phase, dy: &Phase, rtol: f64, atol: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..6 {
        let sc = atol + rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (dy[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / 6.0).sqrt(), (d1 / 6.0).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}
