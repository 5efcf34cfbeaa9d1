//! Dormand-Prince 5(4) embedded Runge-Kutta integrator with adaptive steps.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

// Butcher tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights (equal to the last row of A: first-same-as-last).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t_end`, returning every
/// accepted `(t, y)` including both end points. Steps never exceed `h_max`.
pub fn integrate<const N: usize, F>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    h_max: f64,
    tol: Tolerances,
) -> Result<Vec<(f64, [f64; N])>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(t_end > t0) || !(h_max > 0.0) {
        return Err(Error::domain(
            "ode::integrate",
            format!("need t_end > t0 and h_max > 0 (t0 = {t0}, t_end = {t_end}, h_max = {h_max})"),
        ));
    }
    let mut t = t0;
    let mut y = y0;
    let mut out = vec![(t, y)];
    let mut h = h_max.min(t_end - t0);
    let mut k = [[0.0; N]; 7];
    k[0] = rhs(t, &y);

    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(h_max);
        if h < h_min {
            return Err(Error::StepUnderflow { time: t, step: h });
        }
        for s in 1..7 {
            let mut stage = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for d in 0..N {
                        stage[d] += h * a * kj[d];
                    }
                }
            }
            k[s] = rhs(t + C[s] * h, &stage);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for d in 0..N {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B5[s] * k[s][d];
                lo += B4[s] * k[s][d];
            }
            y5[d] += h * hi;
            let scale = tol.abs + tol.rel * y[d].abs().max(y5[d].abs());
            err = err.max((h * (hi - lo) / scale).abs());
        }
        // f64::max discards NaN, so test the state itself as well.
        if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            t = if t_end - (t + h) <= f64::EPSILON * t_end.abs() {
                t_end
            } else {
                t + h
            };
            y = y5;
            out.push((t, y));
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(h_max);
    }
    Ok(out)
}
