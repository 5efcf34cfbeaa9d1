use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::fft::Fft2;
use super::field::{ComplexField2D, Grid2D};
use crate::constants::HBAR;
use crate::error::{Error, Result};

/// Norm growth (relative to the start) treated as a blow-up in conservative runs.
const MAX_CONSERVATIVE_GROWTH: f64 = 1e6;
/// Largest edge density, relative to the peak, tolerated in a periodic harmonic trap.
const MAX_BOUNDARY_RATIO: f64 = 1e-10;

/// External potential `V(x, y)` in joules.
#[derive(Clone)]
pub enum Potential {
    Zero,
    /// `½ m ω² r²` with the particle mass from [`GpeParams`].
    Harmonic {
        omega: f64,
    },
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Potential {
    pub fn custom<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Potential::Custom(Arc::new(f))
    }

    pub fn sample(&self, grid: &Grid2D, mass: f64) -> Vec<f64> {
        (0..grid.len())
            .map(|k| {
                let (x, y) = grid.position(k);
                match self {
                    Potential::Zero => 0.0,
                    Potential::Harmonic { omega } => 0.5 * mass * omega * omega * (x * x + y * y),
                    Potential::Custom(f) => f(x, y),
                }
            })
            .collect()
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Harmonic { omega } => {
                f.debug_struct("Harmonic").field("omega", omega).finish()
            }
            Potential::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Periodic grid with a damping layer `width` points deep whose loss rate
    /// rises quadratically to `rate` (1/s) at the outer edge.
    Absorbing {
        width: usize,
        rate: f64,
    },
}

#[derive(Debug, Clone)]
pub struct GpeParams {
    /// Effective mass, kg.
    pub mass: f64,
    pub potential: Potential,
    /// Contact interaction strength, J m².
    pub g_interaction: f64,
    /// Net gain rate, 1/s (negative for net loss).
    pub gamma_net: f64,
    /// Gain saturation, m²/s.
    pub gamma_sat: f64,
    pub dt: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    /// Record observables every this many steps (0: only start and end).
    pub sample_every: usize,
}

impl GpeParams {
    pub fn conservative(
        mass: f64,
        potential: Potential,
        g_interaction: f64,
        dt: f64,
        t_end: f64,
    ) -> Self {
        Self {
            mass,
            potential,
            g_interaction,
            gamma_net: 0.0,
            gamma_sat: 0.0,
            dt,
            t_end,
            boundary: Boundary::Periodic,
            sample_every: 100,
        }
    }

    pub fn with_drive(mut self, gamma_net: f64, gamma_sat: f64) -> Self {
        self.gamma_net = gamma_net;
        self.gamma_sat = gamma_sat;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_sampling(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    pub fn is_conservative(&self) -> bool {
        self.gamma_net == 0.0
            && self.gamma_sat == 0.0
            && matches!(self.boundary, Boundary::Periodic)
    }

    /// `0.01 ħ / E_max`, with `E_max` the larger of the top kinetic energy on
    /// the grid and the largest potential magnitude.
    pub fn suggested_dt(&self, grid: &Grid2D) -> f64 {
        let kinetic = HBAR * HBAR * grid.k_squared_max() / (2.0 * self.mass);
        let potential = self
            .potential
            .sample(grid, self.mass)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        0.01 * HBAR / kinetic.max(potential)
    }

    fn validate(&self) -> Result<()> {
        let op = "GpeParams";
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::domain(
                op,
                format!("mass must be positive, got {}", self.mass),
            ));
        }
        if !(self.dt > 0.0 && self.t_end > 0.0) {
            return Err(Error::domain(op, "dt and t_end must be positive"));
        }
        if !(self.gamma_sat >= 0.0)
            || !self.gamma_net.is_finite()
            || !self.g_interaction.is_finite()
        {
            return Err(Error::domain(
                op,
                "gain saturation must be >= 0 and all rates finite",
            ));
        }
        if let Boundary::Absorbing { width, rate } = self.boundary {
            if width == 0 || !(rate >= 0.0) {
                return Err(Error::domain(
                    op,
                    "absorbing layer needs width >= 1 and rate >= 0",
                ));
            }
        }
        Ok(())
    }

    fn absorption_profile(&self, grid: &Grid2D) -> Vec<f64> {
        let Boundary::Absorbing { width, rate } = self.boundary else {
            return vec![0.0; grid.len()];
        };
        let (nx, ny) = (grid.nx(), grid.ny());
        (0..grid.len())
            .map(|k| {
                let (i, j) = (k % nx, k / nx);
                let depth = [i, nx - 1 - i, j, ny - 1 - j].into_iter().min().unwrap();
                if depth >= width {
                    0.0
                } else {
                    let s = (width - depth) as f64 / width as f64;
                    rate * s * s
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observables {
    pub norm: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
    pub total: f64,
    pub peak_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub time: f64,
    pub observables: Observables,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub field: ComplexField2D,
    pub samples: Vec<Sample>,
}

/// Everything a run needs that depends only on grid and parameters.
struct Workspace {
    grid: Grid2D,
    fft: Fft2,
    k_squared: Vec<f64>,
    potential: Vec<f64>,
    absorption: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl Workspace {
    fn new(grid: Grid2D, params: &GpeParams) -> Self {
        Self {
            grid,
            fft: Fft2::new(grid.nx(), grid.ny()),
            k_squared: grid.k_squared(),
            potential: params.potential.sample(&grid, params.mass),
            absorption: params.absorption_profile(&grid),
            spectrum: vec![Complex64::default(); grid.len()],
        }
    }

    fn observables(&mut self, psi: &[Complex64], params: &GpeParams) -> Observables {
        let area = self.grid.cell_area();
        self.spectrum.copy_from_slice(psi);
        self.fft.forward(&mut self.spectrum);
        let kinetic_coeff = HBAR * HBAR / (2.0 * params.mass);
        // Parseval with an unnormalised forward transform.
        let kinetic = self
            .spectrum
            .iter()
            .zip(&self.k_squared)
            .map(|(c, k2)| kinetic_coeff * k2 * c.norm_sqr())
            .sum::<f64>()
            * area
            / self.grid.len() as f64;
        let mut norm = 0.0;
        let mut potential = 0.0;
        let mut quartic = 0.0;
        let mut peak = 0.0f64;
        for (v, pot) in psi.iter().zip(&self.potential) {
            let n = v.norm_sqr();
            norm += n;
            potential += pot * n;
            quartic += n * n;
            peak = peak.max(n);
        }
        let interaction = 0.5 * params.g_interaction * quartic * area;
        let (norm, potential) = (norm * area, potential * area);
        Observables {
            norm,
            kinetic,
            potential,
            interaction,
            total: kinetic + potential + interaction,
            peak_density: peak,
        }
    }

    fn apply_kinetic(&mut self, psi: &mut [Complex64], factors: &[Complex64]) {
        self.fft.forward(psi);
        psi.iter_mut().zip(factors).for_each(|(v, f)| *v *= f);
        self.fft.inverse(psi);
    }
}

/// Exact solution of the local equation
/// `dψ/dt = [-(i/ħ)(V + g|ψ|²) + (γ - Γ|ψ|²)] ψ` over a time `tau`.
///
/// The density follows the logistic law
/// `n(t) = n₀ e^{2γt} / (1 + 2Γ n₀ G(t))`, `G(t) = (e^{2γt} - 1)/2γ`,
/// and the accumulated phase uses `∫n dt = ln(1 + 2Γ n₀ G)/2Γ`.
fn local_factor(n0: f64, potential: f64, g: f64, gamma: f64, sat: f64, tau: f64) -> Complex64 {
    let growth = if gamma == 0.0 {
        tau
    } else {
        (2.0 * gamma * tau).exp_m1() / (2.0 * gamma)
    };
    let denom_arg = 2.0 * sat * n0 * growth;
    let integral = if sat > 0.0 {
        denom_arg.ln_1p() / (2.0 * sat)
    } else {
        n0 * growth
    };
    let amplitude = (gamma * tau).exp() / (1.0 + denom_arg).sqrt();
    let phase = -(potential * tau + g * integral) / HBAR;
    Complex64::from_polar(amplitude, phase)
}

fn check_stability(work: &Workspace, field: &ComplexField2D, params: &GpeParams) -> Result<()> {
    let vmax = work.potential.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut density = field.peak_density();
    if params.gamma_sat > 0.0 && params.gamma_net > 0.0 {
        density = density.max(params.gamma_net / params.gamma_sat);
    }
    let phase = (vmax + params.g_interaction.abs() * density) * params.dt / HBAR;
    if phase > std::f64::consts::PI {
        return Err(Error::domain(
            "evolve",
            format!("position-space phase per step is {phase:.3} rad (> π); reduce dt"),
        ));
    }
    Ok(())
}

/// Advances `field` to `params.t_end` and records observables along the way.
pub fn evolve(field: &ComplexField2D, params: &GpeParams) -> Result<Evolution> {
    params.validate()?;
    let grid = *field.grid();
    let mut work = Workspace::new(grid, params);
    check_stability(&work, field, params)?;

    let steps = ((params.t_end / params.dt).round() as usize).max(1);
    let dt = params.t_end / steps as f64;
    let kinetic_coeff = HBAR / (2.0 * params.mass);
    let half_kick: Vec<Complex64> = work
        .k_squared
        .iter()
        .map(|k2| Complex64::from_polar(1.0, -kinetic_coeff * k2 * 0.5 * dt))
        .collect();

    let mut psi = field.values().to_vec();
    let mut samples = vec![Sample {
        step: 0,
        time: 0.0,
        observables: work.observables(&psi, params),
    }];
    let initial_norm = samples[0].observables.norm;
    let conservative = params.is_conservative();
    let trapped = matches!(params.potential, Potential::Harmonic { .. })
        && matches!(params.boundary, Boundary::Periodic);

    for step in 1..=steps {
        work.apply_kinetic(&mut psi, &half_kick);
        for ((v, pot), loss) in psi.iter_mut().zip(&work.potential).zip(&work.absorption) {
            *v *= local_factor(
                v.norm_sqr(),
                *pot,
                params.g_interaction,
                params.gamma_net - loss,
                params.gamma_sat,
                dt,
            );
        }
        work.apply_kinetic(&mut psi, &half_kick);

        let record = step == steps || (params.sample_every > 0 && step % params.sample_every == 0);
        if record {
            let obs = work.observables(&psi, params);
            if !obs.norm.is_finite() || !obs.total.is_finite() {
                return Err(Error::Instability {
                    step,
                    reason: "field became non-finite".into(),
                });
            }
            if conservative && obs.norm > MAX_CONSERVATIVE_GROWTH * initial_norm {
                return Err(Error::Instability {
                    step,
                    reason: format!("norm grew from {initial_norm:e} to {:e}", obs.norm),
                });
            }
            samples.push(Sample {
                step,
                time: step as f64 * dt,
                observables: obs,
            });
        }
    }
    let field = ComplexField2D::from_values(grid, psi)?;
    if trapped {
        let ratio = field.boundary_ratio();
        if ratio > MAX_BOUNDARY_RATIO {
            return Err(Error::Instability {
                step: steps,
                reason: format!("edge density is {ratio:e} of peak; enlarge the grid"),
            });
        }
    }
    Ok(Evolution { field, samples })
}

/// Energies and norm of `field`.
pub fn observables(field: &ComplexField2D, params: &GpeParams) -> Observables {
    let mut work = Workspace::new(*field.grid(), params);
    work.observables(field.values(), params)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    /// First imaginary-time step; `None` picks `0.05 ħ / E`, with `E` the
    /// single-particle energy per particle of the initial guess.
    pub dtau: Option<f64>,
    /// Number of times the step is quartered after the first stage converges.
    pub refinements: usize,
    /// Final-stage bound on `‖Δψ‖ / (‖ψ‖ dτ E / ħ)`, an estimate of the
    /// relative eigen-residual.
    pub tolerance: f64,
    /// Bound on the relative energy change per iteration at exit.
    pub energy_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            dtau: None,
            refinements: 3,
            tolerance: 1e-9,
            energy_tolerance: 1e-12,
            max_iterations: 400_000,
        }
    }
}

pub fn ground_state(
    initial: &ComplexField2D,
    params: &GpeParams,
    norm_target: f64,
) -> Result<ComplexField2D> {
    ground_state_with(initial, params, norm_target, GroundStateOptions::default())
}

/// Lowest-energy state at fixed norm by split-step imaginary-time relaxation.
///
/// The Strang fixed point differs from the true ground state by `O(dτ²)`, so
/// the step is refined in stages; each stage runs until the per-step change
/// of `ψ` indicates a converged fixed point.
pub fn ground_state_with(
    initial: &ComplexField2D,
    params: &GpeParams,
    norm_target: f64,
    options: GroundStateOptions,
) -> Result<ComplexField2D> {
    params.validate()?;
    if params.gamma_net != 0.0 || params.gamma_sat != 0.0 {
        return Err(Error::domain(
            "ground_state",
            "needs conservative parameters (no gain or saturation)",
        ));
    }
    if !(norm_target > 0.0 && norm_target.is_finite()) {
        return Err(Error::domain(
            "ground_state",
            format!("norm target must be positive, got {norm_target}"),
        ));
    }
    if initial.norm() == 0.0 {
        return Err(Error::domain("ground_state", "initial guess is the vacuum"));
    }
    let grid = *initial.grid();
    let mut work = Workspace::new(grid, params);
    let mut psi = initial.clone();
    psi.set_norm(norm_target);
    let mut psi = psi.values().to_vec();

    let obs = work.observables(&psi, params);
    let mut energy_scale = (obs.kinetic + obs.potential) / obs.norm;
    if !(energy_scale > 0.0) {
        energy_scale = 1e-2 * HBAR * HBAR * grid.k_squared_max() / (2.0 * params.mass);
    }
    let dtau0 = options.dtau.unwrap_or(0.05 * HBAR / energy_scale);
    let area = grid.cell_area();
    let norm_of = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>() * area;
    let kinetic_coeff = HBAR / (2.0 * params.mass);
    let mut previous = psi.clone();
    let mut total_iterations = 0usize;

    for stage in 0..=options.refinements {
        let dtau = dtau0 / 4f64.powi(stage as i32);
        let half_kick: Vec<Complex64> = work
            .k_squared
            .iter()
            .map(|k2| Complex64::new((-kinetic_coeff * k2 * 0.5 * dtau).exp(), 0.0))
            .collect();
        let last = stage == options.refinements;
        let tolerance = if last {
            options.tolerance
        } else {
            options.tolerance.sqrt()
        };
        let scale = dtau * energy_scale / HBAR;
        let mut energy = f64::NAN;

        let mut iteration = 0usize;
        loop {
            previous.copy_from_slice(&psi);
            work.apply_kinetic(&mut psi, &half_kick);
            for (v, pot) in psi.iter_mut().zip(&work.potential) {
                let local = pot + params.g_interaction * v.norm_sqr();
                *v *= (-local * dtau / HBAR).exp();
            }
            work.apply_kinetic(&mut psi, &half_kick);
            let s = (norm_target / norm_of(&psi)).sqrt();
            psi.iter_mut().for_each(|v| *v *= s);

            iteration += 1;
            total_iterations += 1;
            let change = psi
                .iter()
                .zip(&previous)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                * area;
            let residual = (change / norm_target).sqrt() / scale;
            if !residual.is_finite() {
                return Err(Error::Instability {
                    step: total_iterations,
                    reason: "imaginary-time relaxation produced non-finite values".into(),
                });
            }
            if residual < tolerance {
                if !last {
                    break;
                }
                let e = work.observables(&psi, params).total;
                let rel = ((e - energy) / e).abs();
                energy = e;
                if rel < options.energy_tolerance {
                    break;
                }
            }
            if iteration >= options.max_iterations {
                return Err(Error::Convergence {
                    op: "ground_state",
                    iterations: total_iterations,
                    residual,
                });
            }
        }
    }
    ComplexField2D::from_values(grid, psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_factor_limits() {
        // Pure phase.
        let f = local_factor(2.0, 3.0 * HBAR, 0.5 * HBAR, 0.0, 0.0, 0.1);
        assert!((f.norm() - 1.0).abs() < 1e-15);
        assert!((f.arg() + (0.3 + 0.1)).abs() < 1e-14);
        // Pure gain.
        let f = local_factor(1.0, 0.0, 0.0, 2.0, 0.0, 0.5);
        assert!((f.norm() - 1f64.exp()).abs() < 1e-14);
        // Saturated logistic growth reaches γ/Γ.
        let n0 = 1e-3;
        let f = local_factor(n0, 0.0, 0.0, 1.0, 4.0, 40.0);
        assert!((n0 * f.norm_sqr() - 0.25).abs() < 1e-14);
        // Saturation without gain: n = n0 / (1 + 2Γ n0 t).
        let f = local_factor(0.5, 0.0, 0.0, 0.0, 1.0, 2.0);
        assert!((0.5 * f.norm_sqr() - 0.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn absorbing_profile_shape() {
        let grid = Grid2D::square(16, 1.0).unwrap();
        let params = GpeParams::conservative(1.0, Potential::Zero, 0.0, 1.0, 1.0).with_boundary(
            Boundary::Absorbing {
                width: 4,
                rate: 2.0,
            },
        );
        let profile = params.absorption_profile(&grid);
        assert_eq!(profile[0], 2.0);
        assert_eq!(profile[8 * 16 + 8], 0.0);
        assert!(!params.is_conservative());
    }

    #[test]
    fn validation() {
        let grid = Grid2D::square(8, 1.0).unwrap();
        let f = ComplexField2D::gaussian(grid, 0.3, 1.0);
        let bad = GpeParams::conservative(0.0, Potential::Zero, 0.0, 1.0, 1.0);
        assert!(evolve(&f, &bad).is_err());
        let bad = GpeParams::conservative(1.0, Potential::Zero, 0.0, -1.0, 1.0);
        assert!(evolve(&f, &bad).is_err());
        let bad =
            GpeParams::conservative(1.0, Potential::Zero, 0.0, 1.0, 1.0).with_drive(1.0, -1.0);
        assert!(evolve(&f, &bad).is_err());
        let driven =
            GpeParams::conservative(1.0, Potential::Zero, 0.0, 1.0, 1.0).with_drive(1.0, 1.0);
        assert!(ground_state(&f, &driven, 1.0).is_err());
        let ok = GpeParams::conservative(1.0, Potential::Zero, 0.0, 1.0, 1.0);
        assert!(ground_state(&f, &ok, 0.0).is_err());
        assert!(ground_state(&ComplexField2D::zeros(grid), &ok, 1.0).is_err());
    }

    #[test]
    fn oversized_step_rejected() {
        let grid = Grid2D::square(8, 1.0).unwrap();
        let f = ComplexField2D::gaussian(grid, 0.3, 1.0);
        let params =
            GpeParams::conservative(1.0, Potential::custom(|_, _| 10.0 * HBAR), 0.0, 1.0, 1.0);
        assert!(matches!(evolve(&f, &params), Err(Error::Domain { .. })));
    }
}
