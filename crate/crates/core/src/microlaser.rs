//! Single-mode microlaser rate equations.
//!
//! Photon number `P` in the cavity mode and molecular excitation number `N`
//! obey
//!
//! ```text
//! dP/dt = γβN (P + 1) - κP
//! dN/dt = R_p - γN - γβNP
//! ```
//!
//! with `β` the fraction of spontaneous emission entering the mode, `γ` the
//! total spontaneous emission rate, `κ` the cavity loss rate and `R_p` the
//! pump rate. In steady state only `β` and `ρ = R_p/κ` matter, and `P` is
//! the positive root of `βP² + (1 - βρ)P - βρ = 0`.

use crate::error::{Error, Result};
use crate::knee;
use crate::ode::{self, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrolaserParams {
    beta: f64,
    gamma: f64,
    kappa: f64,
    pump_rate: f64,
}

impl MicrolaserParams {
    pub fn new(beta: f64, gamma: f64, kappa: f64, pump_rate: f64) -> Result<Self> {
        check_beta(beta)?;
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(gamma) || !positive(kappa) {
            return Err(Error::domain(
                "MicrolaserParams",
                format!("rates must be positive, got gamma = {gamma}, kappa = {kappa}"),
            ));
        }
        if !(pump_rate >= 0.0 && pump_rate.is_finite()) {
            return Err(Error::domain(
                "MicrolaserParams",
                format!("pump rate must be non-negative, got {pump_rate}"),
            ));
        }
        Ok(Self {
            beta,
            gamma,
            kappa,
            pump_rate,
        })
    }

    /// Parameters with the pump given in units of the cavity loss rate.
    pub fn with_rho(beta: f64, gamma: f64, kappa: f64, rho: f64) -> Result<Self> {
        Self::new(beta, gamma, kappa, rho * kappa)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }

    /// Pump rate in units of the cavity loss rate, `R_p / κ`.
    pub fn rho(&self) -> f64 {
        self.pump_rate / self.kappa
    }

    /// Time derivatives `(dP/dt, dN/dt)` at the given populations.
    pub fn rates(&self, photons: f64, excitations: f64) -> (f64, f64) {
        let gain = self.gamma * self.beta * excitations;
        (
            gain * (photons + 1.0) - self.kappa * photons,
            self.pump_rate - self.gamma * excitations - gain * photons,
        )
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "microlaser",
            format!("beta must lie in (0, 1], got {beta}"),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrolaserState {
    pub photons: f64,
    pub excitations: f64,
    pub time: f64,
}

/// Spontaneous-emission fraction from the Purcell factor, `F_P / (1 + F_P)`.
pub fn purcell_beta(purcell_factor: f64) -> Result<f64> {
    if !(purcell_factor >= 0.0) {
        return Err(Error::domain(
            "purcell_beta",
            format!("Purcell factor must be non-negative, got {purcell_factor}"),
        ));
    }
    if purcell_factor.is_infinite() {
        return Ok(1.0);
    }
    Ok(purcell_factor / (1.0 + purcell_factor))
}

/// Steady-state mode population for given `β` and `ρ`.
///
/// Evaluated so that neither branch subtracts nearly equal numbers: above
/// threshold (`βρ > 1`) the textbook form is used, below it the conjugate
/// form `2βρ / ((1 - βρ) + √D)`.
pub fn photons_at(beta: f64, rho: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::domain(
            "photons_at",
            format!("rho must be >= 0, got {rho}"),
        ));
    }
    let b = 1.0 - beta * rho;
    let root = b.hypot(2.0 * beta * rho.sqrt());
    Ok(if b <= 0.0 {
        (root - b) / (2.0 * beta)
    } else {
        2.0 * beta * rho / (b + root)
    })
}

pub fn steady_state_photons(params: &MicrolaserParams) -> f64 {
    photons_at(params.beta, params.rho()).expect("validated parameters")
}

/// Steady-state excitation number `R_p / (γ (1 + βP))`.
pub fn steady_state_excitations(params: &MicrolaserParams) -> f64 {
    let p = steady_state_photons(params);
    params.pump_rate / (params.gamma * (1.0 + params.beta * p))
}

pub fn steady_state(params: &MicrolaserParams) -> MicrolaserState {
    MicrolaserState {
        photons: steady_state_photons(params),
        excitations: steady_state_excitations(params),
        time: f64::INFINITY,
    }
}

/// Integrates the rate equations from `initial` for a duration `t_end`,
/// with adaptive steps no longer than `dt_max`. Every accepted step is
/// returned.
pub fn integrate(
    params: &MicrolaserParams,
    initial: MicrolaserState,
    t_end: f64,
    dt_max: f64,
) -> Result<Vec<MicrolaserState>> {
    if !(initial.photons >= 0.0 && initial.excitations >= 0.0) {
        return Err(Error::domain(
            "microlaser::integrate",
            "initial populations must be non-negative",
        ));
    }
    if !(t_end > 0.0 && dt_max > 0.0) {
        return Err(Error::domain(
            "microlaser::integrate",
            format!("need t_end > 0 and dt_max > 0, got {t_end}, {dt_max}"),
        ));
    }
    let t0 = initial.time;
    let rhs = |_t: f64, y: &[f64; 2]| {
        let (dp, dn) = params.rates(y[0], y[1]);
        [dp, dn]
    };
    let traj = ode::integrate(
        rhs,
        t0,
        [initial.photons, initial.excitations],
        t0 + t_end,
        dt_max,
        Tolerances::default(),
    )?;
    // The non-negative quadrant is invariant; clip round-off below zero.
    Ok(traj
        .into_iter()
        .map(|(time, y)| MicrolaserState {
            photons: y[0].max(0.0),
            excitations: y[1].max(0.0),
            time,
        })
        .collect())
}

/// Steady-state `(ρ, P)` along a pump grid.
pub fn threshold_curve(beta: f64, rho_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_beta(beta)?;
    crate::bose::check_grid(rho_grid, "threshold_curve")?;
    rho_grid
        .iter()
        .map(|&rho| Ok((rho, photons_at(beta, rho)?)))
        .collect()
}

/// How to pin down a threshold that small systems do not sharply define.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdConvention {
    /// Maximum of `d² ln P / d(ln ρ)²` on the sampled curve.
    Curvature,
    /// Pump at which the mode population reaches one photon.
    UnitPopulation,
}

/// Threshold pump `ρ*` under the chosen convention.
///
/// `UnitPopulation` is exact: `P = 1` gives `ρ* = (1 + β) / (2β)`.
/// `Curvature` is evaluated on `rho_grid`.
pub fn threshold(beta: f64, rho_grid: &[f64], convention: ThresholdConvention) -> Result<f64> {
    check_beta(beta)?;
    match convention {
        ThresholdConvention::UnitPopulation => Ok((1.0 + beta) / (2.0 * beta)),
        ThresholdConvention::Curvature => {
            let curve = threshold_curve(beta, rho_grid)?;
            let (rho, p): (Vec<f64>, Vec<f64>) = curve.into_iter().unzip();
            knee::log_log_knee(&rho, &p)
        }
    }
}
