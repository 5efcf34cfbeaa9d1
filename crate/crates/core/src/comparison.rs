//! Side-by-side comparison of the trapped Bose gas and the microlaser.
//!
//! At vanishing population the ground state of the Bose gas holds the
//! fraction `p₀(x) = 1/Z(x)` of all particles, where
//! `Z(x) = Σ (i+1) e^{-ix} = (1 - e^{-x})^{-2}`. The microlaser mode holds
//! the fraction `β` of the pump at vanishing pump. Equating the two fixes the
//! level spacing for a given `β`: `x = -ln(1 - √β)`. The control axes
//! (total number and `ρ`) are then identified and nothing else is adjusted.

use crate::bose::{self, TrapSpectrum};
use crate::error::{Error, Result};
use crate::microlaser;

/// Stand-in level spacing for `β = 1`, where the matched spacing diverges.
/// Excited levels then carry a fraction ~2e^-50 of the population.
pub const SINGLE_MODE_SPACING: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub beta: f64,
    /// Reduced level spacing `ħω / k_B T`.
    pub x_matched: f64,
    /// Low-population ground-state fraction `p₀(x_matched)`.
    pub low_population_slope: f64,
}

/// Ground-state fraction of the Bose gas in the limit of vanishing
/// population, `(1 - e^{-x})²`.
pub fn low_density_ground_fraction(x: f64) -> f64 {
    let q = -(-x).exp_m1();
    q * q
}

/// Level spacing whose low-population ground-state fraction equals `beta`.
pub fn match_x_to_beta(beta: f64) -> Result<MatchedPair> {
    if !(beta > 0.0) {
        return Err(Error::domain(
            "match_x_to_beta",
            format!("beta must be positive, got {beta}"),
        ));
    }
    if beta >= 1.0 - f64::EPSILON {
        return Err(Error::MatchDiverges { beta });
    }
    let x = -(-beta.sqrt()).ln_1p();
    Ok(MatchedPair {
        beta,
        x_matched: x,
        low_population_slope: low_density_ground_fraction(x),
    })
}

/// Matched spacing, falling back to [`SINGLE_MODE_SPACING`] at `β = 1`.
pub fn matched_spacing(beta: f64) -> Result<f64> {
    match match_x_to_beta(beta) {
        Ok(pair) => Ok(pair.x_matched),
        Err(Error::MatchDiverges { .. }) if beta <= 1.0 => Ok(SINGLE_MODE_SPACING),
        Err(e) => Err(e),
    }
}

/// `|a - b| / max(a, b, 1)`, well behaved for populations near zero.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonPoint {
    /// Shared abscissa: `ρ` for the laser, total number for the Bose gas.
    pub control: f64,
    pub laser_photons: f64,
    pub bec_ground: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub beta: f64,
    pub x_matched: f64,
    pub points: Vec<ComparisonPoint>,
}

impl Comparison {
    pub fn max_deviation(&self) -> f64 {
        self.points.iter().map(|p| p.deviation).fold(0.0, f64::max)
    }
}

pub fn comparison_curves(beta: f64, control_grid: &[f64]) -> Result<Comparison> {
    let x = matched_spacing(beta)?;
    let laser = microlaser::threshold_curve(beta, control_grid)?;
    let bec = bose::condensate_curve(&TrapSpectrum::new(x)?, control_grid)?;
    let points = laser
        .iter()
        .zip(&bec)
        .map(|(&(control, laser_photons), b)| ComparisonPoint {
            control,
            laser_photons,
            bec_ground: b.n_ground,
            deviation: relative_deviation(laser_photons, b.n_ground),
        })
        .collect();
    Ok(Comparison {
        beta,
        x_matched: x,
        points,
    })
}

/// The two "smallness" parameters side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessReport {
    pub beta: f64,
    pub x_matched: f64,
    /// Thermally available trap modes, `(k_B T / ħω)²`.
    pub mode_count: f64,
    /// `k_B T / ħω`.
    pub thermal_ratio: f64,
    pub inverse_beta: f64,
    /// `mode_count / (1/β)`.
    pub ratio: f64,
}

pub fn smallness_report(beta: f64) -> Result<SmallnessReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain(
            "smallness_report",
            format!("beta must lie in (0, 1], got {beta}"),
        ));
    }
    let x = matched_spacing(beta)?;
    let thermal_ratio = 1.0 / x;
    let mode_count = thermal_ratio * thermal_ratio;
    Ok(SmallnessReport {
        beta,
        x_matched: x,
        mode_count,
        thermal_ratio,
        inverse_beta: 1.0 / beta,
        ratio: mode_count * beta,
    })
}
