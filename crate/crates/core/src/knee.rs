//! Threshold locators for sampled population curves.
//!
//! Small systems do not have a sharp threshold, so these helpers only make
//! a particular convention concrete; callers choose which one to report.

use crate::error::{Error, Result};

/// Abscissa of the largest finite-difference second derivative `d²y/dx²`
/// on a non-uniform grid.
pub fn argmax_second_derivative(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let curvature = second_derivative(xs, ys)?;
    let best = curvature
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i + 1)
        .expect("at least one interior point");
    Ok(xs[best])
}

/// Interior second derivatives; entry `k` belongs to `xs[k + 1]`.
pub fn second_derivative(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    check_samples(xs, ys, 3)?;
    Ok(xs
        .windows(3)
        .zip(ys.windows(3))
        .map(|(x, y)| {
            let h1 = x[1] - x[0];
            let h2 = x[2] - x[1];
            2.0 * ((y[2] - y[1]) / h2 - (y[1] - y[0]) / h1) / (h1 + h2)
        })
        .collect())
}

/// Largest secant slope of `ln y` against `ln x`.
pub fn max_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_samples(xs, ys, 2)?;
    Ok(xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] / y[0]).ln() / (x[1] / x[0]).ln())
        .fold(f64::NEG_INFINITY, f64::max))
}

/// A power law bends nowhere; curvatures below this are round-off.
pub const MIN_KNEE_CURVATURE: f64 = 1e-6;

/// Threshold as the point of maximum curvature of `ln y` against `ln x`.
pub fn log_log_knee(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_samples(xs, ys, 3)?;
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::domain("log_log_knee", "samples must be positive"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let max_curvature = second_derivative(&lx, &ly)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if max_curvature <= MIN_KNEE_CURVATURE {
        return Err(Error::NoKnee { max_curvature });
    }
    argmax_second_derivative(&lx, &ly).map(f64::exp)
}

/// First abscissa where `y` reaches `level`, linearly interpolated.
pub fn first_crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return None;
    }
    if ys[0] >= level {
        return Some(xs[0]);
    }
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        (y[0] < level && y[1] >= level)
            .then(|| x[0] + (level - y[0]) * (x[1] - x[0]) / (y[1] - y[0]))
    })
}

fn check_samples(xs: &[f64], ys: &[f64], min_len: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::domain(
            "knee",
            "abscissa and ordinate lengths differ",
        ));
    }
    if xs.len() < min_len {
        return Err(Error::domain(
            "knee",
            format!("need at least {min_len} samples"),
        ));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain(
            "knee",
            "abscissae must be strictly ascending",
        ));
    }
    Ok(())
}
