//! Bose-Einstein statistics of an ideal gas in a 2D isotropic harmonic trap.
//!
//! All energies are measured in units of `k_B T` from the ground state, so the
//! trap is described by one number, the reduced level spacing
//! `x = ħω / k_B T`. Level `i` sits at `i·x` with degeneracy `i + 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Levels kept beyond the thermal energy scale: `i_max · x >= 50`.
const TAIL_THERMAL_ENERGIES: f64 = 50.0;
const MIN_LEVELS: usize = 64;

/// Largest chemical potential the solver will consider (reduced units).
/// Near zero `n_ground ≈ 1/(-mu)`, so this caps the condensate at ~1e14.
pub const MU_CEILING: f64 = -1e-14;

/// Relative tolerance on the particle number returned by [`solve_mu`].
pub const SOLVE_TOLERANCE: f64 = 1e-10;
const SOLVE_MAX_ITERATIONS: usize = 200;

/// Discrete spectrum of the 2D isotropic harmonic oscillator, truncated at
/// `max_level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpectrum {
    spacing: f64,
    max_level: usize,
}

impl TrapSpectrum {
    /// Spectrum with the default truncation `max(64, ceil(50 / x))`.
    pub fn new(spacing: f64) -> Result<Self> {
        check_spacing(spacing)?;
        let needed = (TAIL_THERMAL_ENERGIES / spacing).ceil();
        if needed > 1e8 {
            return Err(Error::domain(
                "TrapSpectrum::new",
                format!("spacing {spacing:e} needs more than 1e8 levels"),
            ));
        }
        Ok(Self {
            spacing,
            max_level: MIN_LEVELS.max(needed as usize),
        })
    }

    pub fn with_max_level(spacing: f64, max_level: usize) -> Result<Self> {
        check_spacing(spacing)?;
        if max_level == 0 {
            return Err(Error::domain("TrapSpectrum", "max_level must be positive"));
        }
        Ok(Self { spacing, max_level })
    }

    /// Reduced level spacing `ħω / k_B T`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn level_energy(&self, level: usize) -> f64 {
        level as f64 * self.spacing
    }

    pub fn degeneracy(&self, level: usize) -> f64 {
        (level + 1) as f64
    }

    fn levels(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..=self.max_level).map(|i| (self.level_energy(i), self.degeneracy(i)))
    }
}

fn check_spacing(spacing: f64) -> Result<()> {
    if spacing > 0.0 && spacing.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            "TrapSpectrum",
            format!("level spacing must be positive and finite, got {spacing}"),
        ))
    }
}

/// Equilibrium populations at a given reduced chemical potential.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumState {
    pub mu: f64,
    pub n_total: f64,
    pub n_ground: f64,
    /// Population of each level, degeneracy included.
    pub level_populations: Vec<f64>,
}

impl EquilibriumState {
    pub fn at_mu(spec: &TrapSpectrum, mu: f64) -> Result<Self> {
        check_mu(mu, "EquilibriumState::at_mu")?;
        let level_populations: Vec<f64> = spec
            .levels()
            .map(|(eps, g)| g * occupancy_unchecked(eps - mu))
            .collect();
        Ok(Self {
            mu,
            n_total: level_populations.iter().sum(),
            n_ground: level_populations[0],
            level_populations,
        })
    }

    pub fn ground_fraction(&self) -> f64 {
        self.n_ground / self.n_total
    }
}

fn occupancy_unchecked(excess: f64) -> f64 {
    1.0 / excess.exp_m1()
}

fn check_mu(mu: f64, op: &'static str) -> Result<()> {
    if mu < 0.0 && !mu.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(
            op,
            format!("chemical potential must be < 0, got {mu}"),
        ))
    }
}

/// Bose-Einstein occupancy `1 / (exp(eps - mu) - 1)` of a single state.
pub fn be_occupancy(eps: f64, mu: f64) -> Result<f64> {
    if !(mu < eps) {
        return Err(Error::domain(
            "be_occupancy",
            format!("need mu < eps, got eps = {eps}, mu = {mu}"),
        ));
    }
    Ok(occupancy_unchecked(eps - mu))
}

/// Expected particle number summed over the truncated spectrum.
pub fn total_number(spec: &TrapSpectrum, mu: f64) -> Result<f64> {
    check_mu(mu, "total_number")?;
    Ok(number_and_derivative(spec, mu).0)
}

// (N, dN/dmu). dN/dmu = Σ g f (1 + f).
fn number_and_derivative(spec: &TrapSpectrum, mu: f64) -> (f64, f64) {
    let mut n = 0.0;
    let mut dn = 0.0;
    // Sum from the top so the small tail terms are not lost against the ground state.
    for i in (0..=spec.max_level).rev() {
        let f = occupancy_unchecked(spec.level_energy(i) - mu);
        let g = spec.degeneracy(i);
        n += g * f;
        dn += g * f * (1.0 + f);
    }
    (n, dn)
}

/// Solves `total_number(spec, mu) = n_target` for the chemical potential.
///
/// Works in `u = -ln(-mu)`, which spreads the physically interesting range
/// (mu from about -50 up to -1e-14) over a well-scaled interval, and runs a
/// Newton iteration on `ln N(u)` safeguarded by a bisection bracket.
pub fn solve_mu(spec: &TrapSpectrum, n_target: f64) -> Result<EquilibriumState> {
    if !(n_target > 0.0 && n_target.is_finite()) {
        return Err(Error::domain(
            "solve_mu",
            format!("target number must be positive and finite, got {n_target}"),
        ));
    }
    let log_target = n_target.ln();
    let residual = |u: f64| -> (f64, f64) {
        let mu = -(-u).exp();
        let (n, dn) = number_and_derivative(spec, mu);
        // d ln N / du = (dN/dmu)(-mu) / N
        (n.ln() - log_target, dn * (-mu) / n)
    };

    let mut u_hi = -(-MU_CEILING).ln();
    let (r_hi, _) = residual(u_hi);
    if r_hi < 0.0 {
        return Err(Error::domain(
            "solve_mu",
            format!("target {n_target:e} exceeds the largest representable population"),
        ));
    }

    // Low-density estimate: N ≈ e^mu / (1 - e^-x)^2.
    let p0 = (-spec.spacing).exp_m1().powi(2);
    let mut mu_lo = ((n_target * p0).ln() - 1.0).min(-1.0);
    let mut u_lo = -(-mu_lo).ln();
    while residual(u_lo).0 > 0.0 {
        mu_lo *= 2.0;
        if mu_lo < -1e6 {
            return Err(Error::Convergence {
                op: "solve_mu (bracketing)",
                iterations: 0,
                residual: f64::NAN,
            });
        }
        u_lo = -(-mu_lo).ln();
    }

    let mut u = 0.5 * (u_lo + u_hi);
    let mut last = f64::INFINITY;
    for iteration in 0..SOLVE_MAX_ITERATIONS {
        let (r, slope) = residual(u);
        last = r.abs();
        if r > 0.0 {
            u_hi = u;
        } else {
            u_lo = u;
        }
        // |ln N - ln n| ≈ relative error; stop well inside the tolerance.
        if r.abs() <= SOLVE_TOLERANCE * 1e-3 || (u_hi - u_lo) <= 4.0 * f64::EPSILON * u.abs() {
            let state = EquilibriumState::at_mu(spec, -(-u).exp())?;
            let rel = ((state.n_total - n_target) / n_target).abs();
            if rel <= SOLVE_TOLERANCE {
                return Ok(state);
            }
            return Err(Error::Convergence {
                op: "solve_mu",
                iterations: iteration + 1,
                residual: rel,
            });
        }
        let newton = u - r / slope;
        u = if slope > 0.0 && newton > u_lo && newton < u_hi {
            newton
        } else {
            0.5 * (u_lo + u_hi)
        };
    }
    Err(Error::Convergence {
        op: "solve_mu",
        iterations: SOLVE_MAX_ITERATIONS,
        residual: last,
    })
}

/// Total particle number at the thermodynamic-limit threshold,
/// `N_C = (π²/6) / x²`.
pub fn critical_number(spec: &TrapSpectrum) -> f64 {
    PI * PI / 6.0 / (spec.spacing * spec.spacing)
}

/// One point on a ground-state population curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n_total: f64,
    pub n_ground: f64,
    pub mu: f64,
}

/// Ground-state population as a function of total particle number.
pub fn condensate_curve(spec: &TrapSpectrum, n_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    check_grid(n_grid, "condensate_curve")?;
    n_grid
        .iter()
        .enumerate()
        .map(|(index, &n)| {
            let state = solve_mu(spec, n).map_err(|e| e.at_grid_point(index, n))?;
            Ok(CurvePoint {
                n_total: n,
                n_ground: state.n_ground,
                mu: state.mu,
            })
        })
        .collect()
}

pub(crate) fn check_grid(grid: &[f64], op: &'static str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(op, "grid is empty"));
    }
    if let Some(bad) = grid.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::domain(
            op,
            format!("grid value {} at index {bad} is not positive", grid[bad]),
        ));
    }
    if let Some(w) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::domain(
            op,
            format!("grid is not strictly ascending at index {}", w + 1),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(x: f64) -> TrapSpectrum {
        TrapSpectrum::new(x).unwrap()
    }

    // Independent oracle: straightforward sum with a generous fixed cutoff.
    fn brute_total(x: f64, mu: f64) -> f64 {
        let top = (200.0 / x).ceil() as usize + 200;
        let mut sum = 0.0;
        for i in (0..=top).rev() {
            let e = i as f64 * x - mu;
            sum += (i + 1) as f64 / (e.exp() - 1.0);
        }
        sum
    }

    #[test]
    fn occupancy_values() {
        assert_relative_eq!(
            be_occupancy(2f64.ln(), 0.0 - 0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            be_occupancy(1.0 + 2f64.ln(), 1.0).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        // 1 / (e^2 - 1), checked against a 30-digit evaluation: 0.156517642749665...
        assert_relative_eq!(
            be_occupancy(1.0, -1.0).unwrap(),
            0.156_517_642_749_665_5,
            max_relative = 1e-14
        );
        assert!(be_occupancy(800.0, 0.0).unwrap() < 1e-300);
    }

    #[test]
    fn occupancy_rejects_mu_at_or_above_energy() {
        assert!(matches!(be_occupancy(0.0, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(be_occupancy(0.5, 1.0), Err(Error::Domain { .. })));
        assert!(be_occupancy(0.5, f64::NAN).is_err());
    }

    #[test]
    fn spectrum_truncation_default() {
        assert_eq!(spec(10.0).max_level(), 64);
        assert_eq!(spec(0.1).max_level(), 500);
        assert!(TrapSpectrum::new(0.0).is_err());
        assert!(TrapSpectrum::new(-1.0).is_err());
        assert!(TrapSpectrum::with_max_level(1.0, 0).is_err());
    }

    #[test]
    fn total_number_at_unit_spacing() {
        // Σ (i+1)/(e^{i+1} - 1); 30-digit series sum 1.18660073351489282...
        let n = total_number(&spec(1.0), -1.0).unwrap();
        assert_relative_eq!(n, brute_total(1.0, -1.0), max_relative = 1e-13);
        assert_relative_eq!(n, 1.186_600_733_514_892_8, max_relative = 1e-14);
        assert!(total_number(&spec(1.0), -700.0).unwrap() < 1e-300);
        assert!(total_number(&spec(1.0), 0.0).is_err());
    }

    #[test]
    fn total_number_monotone_in_mu() {
        for x in [0.01, 0.3, 1.0, 7.0] {
            let s = spec(x);
            assert!(total_number(&s, -0.01).unwrap() > total_number(&s, -1.0).unwrap());
        }
    }

    #[test]
    fn doubling_truncation_is_negligible() {
        for x in [0.005, 0.05, 0.7, 3.0, 20.0] {
            let s = spec(x);
            let wide = TrapSpectrum::with_max_level(x, 2 * s.max_level()).unwrap();
            for mu in [-1e-9, -0.3, -20.0] {
                let a = total_number(&s, mu).unwrap();
                let b = total_number(&wide, mu).unwrap();
                assert!(((a - b) / b).abs() < 1e-12, "x={x} mu={mu}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn solve_round_trip() {
        for x in [0.05, 0.2, 1.0, 5.0] {
            let s = spec(x);
            let n = total_number(&s, -0.5).unwrap();
            let state = solve_mu(&s, n).unwrap();
            assert!((state.mu + 0.5).abs() < 1e-9, "x={x}: {}", state.mu);
        }
    }

    #[test]
    fn low_density_limit() {
        for x in [0.1, 1.0, 4.0] {
            let s = spec(x);
            let n = 1e-6;
            let state = solve_mu(&s, n).unwrap();
            let leading = (n * (-x).exp_m1().powi(2)).ln();
            assert!((state.mu - leading).abs() < 1e-5, "x={x}");
            assert_relative_eq!(brute_total(x, state.mu), n, max_relative = 1e-10);
        }
    }

    #[test]
    fn state_invariants() {
        let state = solve_mu(&spec(0.2), 300.0).unwrap();
        assert!(state.mu < 0.0);
        assert!(state.n_ground <= state.n_total);
        assert!(state.level_populations.iter().all(|&p| p >= 0.0));
        let sum: f64 = state.level_populations.iter().sum();
        assert_relative_eq!(sum, state.n_total, max_relative = 1e-12);
        assert_relative_eq!(state.n_total, 300.0, max_relative = 1e-10);
    }

    #[test]
    fn condensed_above_twice_critical() {
        let s = spec(0.1);
        let state = solve_mu(&s, 2.0 * critical_number(&s)).unwrap();
        assert!(state.ground_fraction() > 0.3, "{}", state.ground_fraction());
    }

    #[test]
    fn fraction_tends_to_one() {
        let s = spec(0.2);
        let state = solve_mu(&s, 100.0 * critical_number(&s)).unwrap();
        assert!(state.ground_fraction() > 0.9);
        let single = solve_mu(&spec(30.0), 5.0).unwrap();
        assert!(single.ground_fraction() > 1.0 - 1e-12);
    }

    #[test]
    fn solve_rejects_bad_targets() {
        let s = spec(1.0);
        assert!(solve_mu(&s, 0.0).is_err());
        assert!(solve_mu(&s, -3.0).is_err());
        assert!(solve_mu(&s, f64::INFINITY).is_err());
        assert!(solve_mu(&s, 1e20).is_err());
    }

    #[test]
    fn critical_number_values() {
        assert_relative_eq!(
            critical_number(&spec(1.0)),
            1.644_934_066_848_226,
            max_relative = 1e-15
        );
        assert!((critical_number(&spec(0.1)) - 164.4934).abs() < 1e-4);
        assert_relative_eq!(
            critical_number(&spec(0.05)),
            4.0 * critical_number(&spec(0.1)),
            max_relative = 1e-14
        );
    }

    #[test]
    fn curve_single_mode_regime() {
        let grid: Vec<f64> = (0..40)
            .map(|k| 10f64.powf(-2.0 + 0.15 * k as f64))
            .collect();
        let curve = condensate_curve(&spec(10.0), &grid).unwrap();
        for p in &curve {
            // Excited levels hold at most ~2e^-10 of the ground population.
            assert!(p.n_ground / p.n_total > 1.0 - 1e-4);
            assert!(p.n_ground < p.n_total);
        }
    }

    #[test]
    fn curve_knee_near_critical_number() {
        let s = spec(0.05);
        let grid: Vec<f64> = (0..=400)
            .map(|k| 10f64.powf(2.0 + 1.5 * k as f64 / 400.0))
            .collect();
        let curve = condensate_curve(&s, &grid).unwrap();
        let xs: Vec<f64> = curve.iter().map(|p| p.n_total).collect();
        let ys: Vec<f64> = curve.iter().map(|p| p.n_ground).collect();
        let knee = crate::knee::argmax_second_derivative(&xs, &ys).unwrap();
        let nc = critical_number(&s);
        assert!((knee / nc - 1.0).abs() < 0.25, "knee {knee} vs N_C {nc}");
    }

    #[test]
    fn curve_errors_name_grid_point() {
        let err = condensate_curve(&spec(1.0), &[1.0, 1e30]).unwrap_err();
        assert!(matches!(err, Error::GridPoint { index: 1, .. }), "{err}");
        assert!(condensate_curve(&spec(1.0), &[2.0, 1.0]).is_err());
        assert!(condensate_curve(&spec(1.0), &[0.0, 1.0]).is_err());
    }

    // μ-scan oracle: tabulate (N, n_ground) on a dense grid of mu, then
    // interpolate n_ground at the requested N in log-log space.
    fn scan_oracle(x: f64, n: f64) -> f64 {
        let samples = 4000;
        let table: Vec<(f64, f64)> = (0..=samples)
            .map(|k| {
                let u = -4.0 + 34.0 * k as f64 / samples as f64;
                let mu = -(-u).exp();
                (brute_total(x, mu).ln(), (1.0 / (-mu).exp_m1()).ln())
            })
            .collect();
        let target = n.ln();
        let k = table.partition_point(|&(ln_n, _)| ln_n < target);
        // Refine the bracketing cell by bisection on the oracle itself.
        let u_of = |k: usize| -4.0 + 34.0 * k as f64 / samples as f64;
        let (mut a, mut b) = (u_of(k - 1), u_of(k));
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if brute_total(x, -(-m).exp()).ln() < target {
                a = m;
            } else {
                b = m;
            }
        }
        let u = 0.5 * (a + b);
        1.0 / (-u).exp().exp_m1()
    }

    #[test]
    fn matches_mu_scan_oracle() {
        for &(x, n) in &[
            (0.05, 50.0),
            (0.05, 2000.0),
            (0.3, 3.0),
            (1.0, 0.2),
            (2.5, 40.0),
        ] {
            let got = solve_mu(&spec(x), n).unwrap().n_ground;
            let want = scan_oracle(x, n);
            assert!(
                ((got - want) / want).abs() < 1e-6,
                "x={x} n={n}: {got} vs {want}"
            );
        }
    }

    proptest! {
        #[test]
        fn total_number_increasing(x in 0.01f64..10.0, a in -30.0f64..-1e-6, b in -30.0f64..-1e-6) {
            prop_assume!((a - b).abs() > 1e-9);
            let s = spec(x);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(total_number(&s, lo).unwrap() < total_number(&s, hi).unwrap());
        }

        #[test]
        fn solve_hits_target(x in 0.02f64..8.0, log_n in -6.0f64..5.0) {
            let n = 10f64.powf(log_n);
            let state = solve_mu(&spec(x), n).unwrap();
            prop_assert!(((state.n_total - n) / n).abs() <= SOLVE_TOLERANCE);
            prop_assert!(state.mu < 0.0);
            prop_assert!(state.n_ground <= state.n_total);
        }
    }
}
