//! Photons in a curved-mirror microcavity as massive particles in a trap.
//!
//! For a cavity of on-axis length `L₀` filled with a medium of index `n`,
//! operating in longitudinal mode `q`, the cutoff wavelength is
//! `λ₀ = 2nL₀/q`. Paraxial photons then behave like particles with
//!
//! ```text
//! E(r, p) = m c*² + p²/2m + V(r),   m = h n² / (c λ₀),   c* = c/n
//! ```
//!
//! where a local shortening of the cavity `δL(r)` costs energy
//! `V(r) = m c*² |δL(r)| / L₀`.
//!
//! Trap frequency: a spherical mirror of radius `R` facing a plane mirror
//! shortens the cavity by the sagitta `R - √(R² - r²) ≈ r²/(2R)`, so
//! `V(r) ≈ m c*² r² / (2 R L₀)`. Equating this with `m ω² r² / 2` gives
//! `ω = c* / √(R L₀)`.

use crate::constants::{BOLTZMANN, HBAR, PLANCK, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Refractive index of ethylene glycol, used when none is given.
pub const DEFAULT_REFRACTIVE_INDEX: f64 = 1.44;

/// Relative length change beyond which the potential mapping is not trusted.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;
/// Transverse momentum, as a fraction of `m c*`, beyond which the quadratic
/// dispersion is not trusted.
pub const PARAXIAL_LIMIT: f64 = 0.3;
/// Minimum `R / L₀` for the harmonic approximation to be flagged valid.
pub const HARMONIC_RADIUS_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    q: u32,
    n_refractive: f64,
    length_l0: f64,
    cutoff_lambda0: f64,
    mirror_radius: f64,
    temperature: f64,
}

impl CavityGeometry {
    /// Geometry from the cutoff wavelength (m); `L₀ = q λ₀ / 2n`.
    pub fn from_cutoff(
        q: u32,
        n_refractive: f64,
        cutoff_lambda0: f64,
        mirror_radius: f64,
        temperature: f64,
    ) -> Result<Self> {
        check_common(q, n_refractive, mirror_radius, temperature)?;
        check_positive("cutoff wavelength", cutoff_lambda0)?;
        Ok(Self {
            q,
            n_refractive,
            length_l0: q as f64 * cutoff_lambda0 / (2.0 * n_refractive),
            cutoff_lambda0,
            mirror_radius,
            temperature,
        })
    }

    /// Geometry from the on-axis cavity length (m); `λ₀ = 2nL₀/q`.
    pub fn from_length(
        q: u32,
        n_refractive: f64,
        length_l0: f64,
        mirror_radius: f64,
        temperature: f64,
    ) -> Result<Self> {
        check_common(q, n_refractive, mirror_radius, temperature)?;
        check_positive("cavity length", length_l0)?;
        Ok(Self {
            q,
            n_refractive,
            length_l0,
            cutoff_lambda0: 2.0 * n_refractive * length_l0 / q as f64,
            mirror_radius,
            temperature,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn n_refractive(&self) -> f64 {
        self.n_refractive
    }
    pub fn length_l0(&self) -> f64 {
        self.length_l0
    }
    pub fn cutoff_lambda0(&self) -> f64 {
        self.cutoff_lambda0
    }
    pub fn mirror_radius(&self) -> f64 {
        self.mirror_radius
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Speed of light in the medium, `c/n`.
    pub fn cstar(&self) -> f64 {
        SPEED_OF_LIGHT / self.n_refractive
    }

    /// Whether `R ≫ L₀`, so that the trap is harmonic near the axis.
    pub fn harmonic_valid(&self) -> bool {
        self.mirror_radius >= HARMONIC_RADIUS_RATIO * self.length_l0
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            "CavityGeometry",
            format!("{what} must be positive, got {v}"),
        ))
    }
}

fn check_common(q: u32, n: f64, radius: f64, temperature: f64) -> Result<()> {
    if q == 0 {
        return Err(Error::domain(
            "CavityGeometry",
            "longitudinal mode index must be >= 1",
        ));
    }
    check_positive("refractive index", n)?;
    check_positive("mirror radius", radius)?;
    check_positive("temperature", temperature)
}

/// Effective photon mass `h n² / (c λ₀)` in kg.
pub fn effective_mass(geom: &CavityGeometry) -> f64 {
    PLANCK * geom.n_refractive * geom.n_refractive / (SPEED_OF_LIGHT * geom.cutoff_lambda0)
}

/// Angular trap frequency `c* / √(R L₀)` in rad/s.
pub fn trap_frequency(geom: &CavityGeometry) -> f64 {
    geom.cstar() / (geom.mirror_radius * geom.length_l0).sqrt()
}

/// `ħω / k_B T`, the level spacing of the trap in thermal units.
pub fn reduced_spacing(geom: &CavityGeometry) -> f64 {
    HBAR * trap_frequency(geom) / (BOLTZMANN * geom.temperature)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonParticle {
    pub mass: f64,
    pub cstar: f64,
    pub trap_omega: f64,
    pub rest_energy: f64,
}

impl PhotonParticle {
    pub fn from_geometry(geom: &CavityGeometry) -> Self {
        let mass = effective_mass(geom);
        let cstar = geom.cstar();
        Self {
            mass,
            cstar,
            trap_omega: trap_frequency(geom),
            rest_energy: mass * cstar * cstar,
        }
    }

    /// Harmonic-oscillator length `√(ħ / mω)`.
    pub fn oscillator_length(&self) -> f64 {
        (HBAR / (self.mass * self.trap_omega)).sqrt()
    }

    pub fn is_paraxial(&self, momentum: f64) -> bool {
        momentum.abs() / (self.mass * self.cstar) <= PARAXIAL_LIMIT
    }
}

/// Exact depth of a spherical cap of radius `radius` at distance `r` from the
/// axis, `R - √(R² - r²)`, in a cancellation-free form.
pub fn spherical_sagitta(radius: f64, r: f64) -> f64 {
    r * r / (radius + ((radius - r) * (radius + r)).sqrt())
}

/// Maps a cavity-length profile onto a potential energy landscape (J).
///
/// `delta_l(r)` is the local length deviation measured from the longest
/// point of the cavity, so it is `<= 0` and the returned potential
/// `V(r) = -m c*² δL(r) / L₀` is `>= 0`. Evaluations where `|δL| / L₀`
/// exceeds [`PERTURBATIVE_LIMIT`] are logged as warnings.
pub fn potential_from_length_profile<F>(geom: &CavityGeometry, delta_l: F) -> impl Fn(f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let particle = PhotonParticle::from_geometry(geom);
    let l0 = geom.length_l0;
    move |r| {
        let dl = delta_l(r);
        if dl.abs() / l0 > PERTURBATIVE_LIMIT {
            log::warn!(
                "length deviation {dl:e} m at r = {r:e} m exceeds {PERTURBATIVE_LIMIT} L0; potential mapping is not perturbative"
            );
        }
        -particle.rest_energy * dl / l0
    }
}

/// Length profile of a spherical mirror against a plane mirror.
pub fn spherical_length_profile(radius: f64) -> impl Fn(f64) -> f64 {
    move |r| -spherical_sagitta(radius, r)
}

/// Quadratic approximation `-r² / 2R` of [`spherical_length_profile`].
pub fn harmonic_length_profile(radius: f64) -> impl Fn(f64) -> f64 {
    move |r| -r * r / (2.0 * radius)
}

/// Particle energy `m c*² + p²/2m + V(r)` (J).
pub fn dispersion_energy<V>(particle: &PhotonParticle, momentum: f64, r: f64, potential: V) -> f64
where
    V: Fn(f64) -> f64,
{
    if !particle.is_paraxial(momentum) {
        log::warn!(
            "momentum {momentum:e} is beyond {PARAXIAL_LIMIT} m c*; quadratic dispersion is degraded"
        );
    }
    particle.rest_energy + momentum * momentum / (2.0 * particle.mass) + potential(r)
}
