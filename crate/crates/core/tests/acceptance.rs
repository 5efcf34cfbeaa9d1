//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use photon_condensate::bose::{condensate_curve, critical_number, TrapSpectrum};
use photon_condensate::cavity::{effective_mass, trap_frequency, CavityGeometry, PhotonParticle};
use photon_condensate::comparison::{
    comparison_curves, low_density_ground_fraction, matched_spacing,
};
use photon_condensate::constants::{HBAR, HC_EV_NM, PLANCK, SPEED_OF_LIGHT};
use photon_condensate::gpe::{evolve, ground_state, ComplexField2D, GpeParams, Grid2D, Potential};
use photon_condensate::knee;
use photon_condensate::microlaser::{
    integrate, photons_at, steady_state, threshold, MicrolaserParams, MicrolaserState,
    ThresholdConvention,
};
use photon_condensate::spectro::{fit_ks, with_multiplicative_noise, SyntheticSpectra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn condensate_sharpening() -> Outcome {
    let grid = log_grid(1e-2, 1e4, 600);
    let mut slopes = Vec::new();
    for x in [0.05, 0.2, 1.0, 5.0] {
        let spec = TrapSpectrum::new(x).map_err(|e| e.to_string())?;
        let curve = condensate_curve(&spec, &grid).map_err(|e| e.to_string())?;
        for w in curve.windows(2) {
            ensure(w[1].n_ground >= w[0].n_ground && w[1].mu > w[0].mu, || {
                format!("x = {x}: curve not monotone at n = {}", w[1].n_total)
            })?;
        }
        for p in &curve {
            ensure(p.n_ground <= p.n_total, || {
                format!("x = {x}: n0 > n at n = {}", p.n_total)
            })?;
        }
        if x == 5.0 {
            let min = curve
                .iter()
                .map(|p| p.n_ground / p.n_total)
                .fold(f64::INFINITY, f64::min);
            ensure(min > 0.98, || {
                format!("x = 5 ground fraction drops to {min}")
            })?;
        }
        let (n, n0): (Vec<f64>, Vec<f64>) = curve.iter().map(|p| (p.n_total, p.n_ground)).unzip();
        slopes.push(knee::max_log_slope(&n, &n0).map_err(|e| e.to_string())?);
    }
    ensure(slopes.windows(2).all(|w| w[0] > w[1]), || {
        format!("knee slopes not ordered: {slopes:?}")
    })?;
    Ok(format!(
        "knee slopes {:.3?} for x = 0.05, 0.2, 1, 5",
        slopes
    ))
}

fn critical_number_and_knee() -> Outcome {
    let spec = TrapSpectrum::new(0.1).map_err(|e| e.to_string())?;
    let nc = critical_number(&spec);
    ensure((nc - 164.4934).abs() <= 1e-4, || format!("N_C = {nc}"))?;
    let grid = log_grid(1.0, 1e4, 800);
    let curve = condensate_curve(&spec, &grid).map_err(|e| e.to_string())?;
    let (n, n0): (Vec<f64>, Vec<f64>) = curve.iter().map(|p| (p.n_total, p.n_ground)).unzip();
    let knee = knee::argmax_second_derivative(&n, &n0).map_err(|e| e.to_string())?;
    let off = (knee / nc - 1.0).abs();
    ensure(off < 0.25, || format!("knee at {knee}, N_C = {nc}"))?;
    Ok(format!(
        "N_C = {nc:.6}, knee at {knee:.1} ({:.1}% off)",
        100.0 * off
    ))
}

fn microlaser_steady_state() -> Outcome {
    let betas = log_grid(1e-6, 1.0, 100);
    let rhos = log_grid(1e-3, 1e8, 100);
    let mut worst = 0.0f64;
    for &b in &betas {
        for &r in &rhos {
            let p = photons_at(b, r).map_err(|e| e.to_string())?;
            let terms = [b * p * p, (1.0 - b * r) * p, -b * r];
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            worst = worst.max(terms.iter().sum::<f64>().abs() / scale);
        }
    }
    ensure(worst < 1e-12, || format!("quadratic residual {worst:e}"))?;
    let mut ulps = 0u64;
    for &r in &log_grid(1e-6, 1e12, 1000) {
        let p = photons_at(1.0, r).map_err(|e| e.to_string())?;
        ulps = ulps.max(p.to_bits().abs_diff(r.to_bits()));
    }
    ensure(ulps <= 4, || format!("beta = 1 off by {ulps} ulp"))?;
    let beta = 1e-5;
    let knee = threshold(
        beta,
        &log_grid(1.0, 1e10, 2001),
        ThresholdConvention::Curvature,
    )
    .map_err(|e| e.to_string())?;
    let factor = (knee * beta).max(1.0 / (knee * beta));
    ensure(factor < 2.0, || {
        format!("threshold knee {knee:e} vs 1/beta = {:e}", 1.0 / beta)
    })?;
    Ok(format!(
        "residual {worst:.1e}, beta = 1 within {ulps} ulp, knee {knee:.4e} (factor {factor:.3})"
    ))
}

fn microlaser_dynamics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut log_uniform = |lo: f64, hi: f64| (lo.ln() + (hi / lo).ln() * rng.gen::<f64>()).exp();
    let mut worst = 0.0f64;
    let mut draws = Vec::new();
    for _ in 0..10 {
        let beta = log_uniform(0.1, 1.0);
        let gamma = log_uniform(0.1, 10.0);
        let kappa = log_uniform(0.1, 10.0);
        let rho = log_uniform(0.1, 10.0) / beta;
        draws.push((beta, gamma, kappa, rho));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (beta, gamma, kappa, rho) in draws {
        let params =
            MicrolaserParams::with_rho(beta, gamma, kappa, rho).map_err(|e| e.to_string())?;
        let ss = steady_state(&params);
        let t_end = 50.0 / gamma.min(kappa);
        for _ in 0..20 {
            let start = MicrolaserState {
                photons: rng.gen::<f64>() * 3.0 * ss.photons.max(1.0),
                excitations: rng.gen::<f64>() * 3.0 * ss.excitations.max(1.0),
                time: 0.0,
            };
            let traj = integrate(&params, start, t_end, t_end).map_err(|e| e.to_string())?;
            let last = traj.last().ok_or("empty trajectory")?;
            let dp = (last.photons / ss.photons - 1.0).abs();
            let dn = (last.excitations / ss.excitations - 1.0).abs();
            worst = worst.max(dp).max(dn);
        }
    }
    ensure(worst < 1e-6, || {
        format!("worst relative distance {worst:e}")
    })?;
    Ok(format!(
        "200 trajectories, worst relative distance {worst:.2e}"
    ))
}

fn model_comparison() -> Outcome {
    let grid = log_grid(0.01, 100.0, 400);
    let mut devs = Vec::new();
    for beta in [0.1, 0.5, 0.9, 1.0] {
        let x = matched_spacing(beta).map_err(|e| e.to_string())?;
        let mismatch = (low_density_ground_fraction(x) - beta).abs();
        ensure(mismatch <= 1e-8, || {
            format!("beta = {beta}: |p0 - beta| = {mismatch:e}")
        })?;
        let cmp = comparison_curves(beta, &grid).map_err(|e| e.to_string())?;
        devs.push(cmp.max_deviation());
    }
    ensure(devs.windows(2).all(|w| w[1] <= w[0]), || {
        format!("deviations not ordered: {devs:?}")
    })?;
    ensure(devs[3] < 1e-6, || {
        format!("beta = 1 deviation {:e}", devs[3])
    })?;
    let shown: Vec<String> = devs.iter().map(|d| format!("{d:.3e}")).collect();
    Ok(format!("max deviations {}", shown.join(", ")))
}

fn cavity_benchmark() -> Outcome {
    let mut freqs = Vec::new();
    for n in [1.44, 1.47, 1.5] {
        let geom =
            CavityGeometry::from_cutoff(8, n, 580e-9, 0.5, 300.0).map_err(|e| e.to_string())?;
        let nu = trap_frequency(&geom) / (2.0 * PI);
        ensure((30e9..=50e9).contains(&nu), || {
            format!("n = {n}: nu = {nu:e} Hz")
        })?;
        let rest = effective_mass(&geom) * geom.cstar().powi(2);
        let photon = PLANCK * SPEED_OF_LIGHT / 580e-9;
        let rel = (rest / photon - 1.0).abs();
        ensure(rel <= 1e-12, || format!("n = {n}: m c*^2 off by {rel:e}"))?;
        freqs.push(nu / 1e9);
    }
    Ok(format!("nu = {:.2?} GHz for n = 1.44, 1.47, 1.5", freqs))
}

fn gpe_checks() -> Outcome {
    let geom =
        CavityGeometry::from_cutoff(8, 1.44, 580e-9, 0.5, 300.0).map_err(|e| e.to_string())?;
    let particle = PhotonParticle::from_geometry(&geom);
    let (mass, omega, l) = (
        particle.mass,
        particle.trap_omega,
        particle.oscillator_length(),
    );

    // Conservative run from the interacting ground state.
    let grid = Grid2D::square(128, 8.0 * l).map_err(|e| e.to_string())?;
    let g = 20.0 * HBAR * HBAR / mass;
    let params = GpeParams::conservative(mass, Potential::Harmonic { omega }, g, 1.0, 1.0);
    let gs = ground_state(&ComplexField2D::gaussian(grid, l, 1.0), &params, 1.0)
        .map_err(|e| e.to_string())?;
    let dt = params.suggested_dt(&grid);
    let run_params = GpeParams {
        dt,
        t_end: 1000.0 * dt,
        sample_every: 10,
        ..params
    };
    let run = evolve(&gs, &run_params).map_err(|e| e.to_string())?;
    let first = run.samples[0].observables;
    let (mut dn, mut de) = (0.0f64, 0.0f64);
    for s in &run.samples {
        dn = dn.max((s.observables.norm / first.norm - 1.0).abs());
        de = de.max((s.observables.total / first.total - 1.0).abs());
    }
    ensure(run.samples.last().map(|s| s.step) == Some(1000), || {
        "run did not take 1000 steps".into()
    })?;
    ensure(dn < 1e-10 && de < 1e-8, || {
        format!("norm drift {dn:e}, energy drift {de:e}")
    })?;

    // Driven uniform field approaches the gain-saturation fixed point.
    let small = Grid2D::square(16, 4.0 * l).map_err(|e| e.to_string())?;
    let gamma = 1e9;
    let target: f64 = 1e12;
    let seed = ComplexField2D::uniform(small, Complex64::new((1e-4 * target).sqrt(), 0.0));
    let driven = GpeParams::conservative(mass, Potential::Zero, 0.0, 0.05 / gamma, 40.0 / gamma)
        .with_drive(gamma, gamma / target);
    let out = evolve(&seed, &driven).map_err(|e| e.to_string())?;
    let fixed = out
        .field
        .density()
        .iter()
        .map(|d| (d / target - 1.0).abs())
        .fold(0.0, f64::max);
    ensure(fixed < 1e-8, || format!("driven density off by {fixed:e}"))?;

    // Plane-wave phase rotation.
    let wave_grid = Grid2D::square(32, 8.0 * l).map_err(|e| e.to_string())?;
    let k = 2.0 * PI * 3.0 / (32.0 * wave_grid.dx());
    let rate_exact = HBAR * k * k / (2.0 * mass);
    let step = GpeParams::conservative(
        mass,
        Potential::Zero,
        0.0,
        0.05 / rate_exact,
        0.05 / rate_exact,
    )
    .with_sampling(0);
    let mut field = ComplexField2D::from_fn(wave_grid, |x, _| Complex64::from_polar(1.0, k * x));
    let mut phase = 0.0;
    let steps = 400;
    for _ in 0..steps {
        let next = evolve(&field, &step).map_err(|e| e.to_string())?.field;
        phase += (next.values()[0] / field.values()[0]).arg();
        field = next;
    }
    let rate = -phase / (steps as f64 * step.dt);
    let rate_err = (rate / rate_exact - 1.0).abs();
    ensure(rate_err < 1e-8, || {
        format!("phase rate off by {rate_err:e}")
    })?;
    Ok(format!(
        "norm drift {dn:.1e}, energy drift {de:.1e}, fixed point {fixed:.1e}, phase rate {rate_err:.1e}"
    ))
}

fn kennard_stepanov() -> Outcome {
    let synth = SyntheticSpectra::default();
    let pair = synth.generate().map_err(|e| e.to_string())?;
    let fit = fit_ks(&pair).map_err(|e| e.to_string())?;
    let t_err = (fit.temperature_fit / 300.0 - 1.0).abs();
    ensure(t_err <= 1e-3, || format!("T = {} K", fit.temperature_fit))?;
    let spacing = pair.wavelengths_nm()[1] - pair.wavelengths_nm()[0];
    let zpl_nm = HC_EV_NM / synth.zpl_energy();
    let zpl_off = (fit.zpl_wavelength - zpl_nm).abs();
    ensure(zpl_off <= spacing, || {
        format!("ZPL {} nm vs {zpl_nm} nm", fit.zpl_wavelength)
    })?;
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noisy = with_multiplicative_noise(&pair, 0.01, &mut rng).map_err(|e| e.to_string())?;
        let fit = fit_ks(&noisy).map_err(|e| format!("seed {seed}: {e}"))?;
        worst = worst.max((fit.temperature_fit / 300.0 - 1.0).abs());
    }
    ensure(worst <= 0.05, || {
        format!("noisy T off by {:.2}%", 100.0 * worst)
    })?;
    Ok(format!(
        "T = {:.4} K, ZPL off by {zpl_off:.2e} nm, noisy worst {:.2}%",
        fit.temperature_fit,
        100.0 * worst
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "condensate curves sharpen with decreasing x",
            10,
            condensate_sharpening,
        ),
        (
            "critical number and knee position",
            5,
            critical_number_and_knee,
        ),
        ("microlaser steady state", 5, microlaser_steady_state),
        (
            "rate equations relax to the steady state",
            30,
            microlaser_dynamics,
        ),
        (
            "laser and condensate curves coincide as beta -> 1",
            30,
            model_comparison,
        ),
        ("cavity trap frequency and rest energy", 1, cavity_benchmark),
        ("GPE conservation and fixed points", 60, gpe_checks),
        (
            "Kennard-Stepanov temperature recovery",
            10,
            kennard_stepanov,
        ),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => Err(format!(
                "{detail}; took {:.2} s, budget {budget} s",
                elapsed.as_secs_f64()
            )),
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS {}. {name}: {detail} [{:.2} s]",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(reason) => {
                failed += 1;
                println!(
                    "FAIL {}. {name}: {reason} [{:.2} s]",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
