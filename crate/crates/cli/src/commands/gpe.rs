//! Gross-Pitaevskii evolution of the cavity photon field, in units of the
//! trap: lengths in oscillator lengths `l`, rates in trap frequencies `ω`.

use anyhow::{bail, Result};
use num_complex::Complex64;
use photon_condensate::cavity::{CavityGeometry, PhotonParticle};
use photon_condensate::constants::HBAR;
use photon_condensate::gpe::{
    evolve, ground_state, Boundary, ComplexField2D, GpeParams, Grid2D, Potential,
};

use crate::config::{Key, RunConfig};
use crate::output::{Artifact, Report, Table};
use crate::svg::{Plot, Scale};

pub const KEYS: &[Key] = &[
    Key::new("q", "8", "longitudinal mode number"),
    Key::new("n", "1.44", "refractive index"),
    Key::new("lambda0_nm", "580", "cutoff wavelength in nm"),
    Key::new("R_m", "0.5", "mirror radius of curvature in m"),
    Key::new("grid", "64", "grid points per side (power of two)"),
    Key::new(
        "half_width",
        "8",
        "half side of the box, in oscillator lengths",
    ),
    Key::new("norm", "1", "photon number ∫|ψ|² dA"),
    Key::new("interaction", "0", "g·norm in units of ħ²/m"),
    Key::new(
        "gain",
        "0",
        "net gain γ_net in units of ω (negative for loss)",
    ),
    Key::new("saturation", "0", "gain saturation Γ in units of ω·l²"),
    Key::new("initial", "ground", "initial state: ground or gaussian"),
    Key::new(
        "offset",
        "0",
        "displacement of the initial state along x, in l",
    ),
    Key::new("periods", "1", "duration in trap periods"),
    Key::new(
        "dt",
        "0.005",
        "time step in units of 1/ω; empty picks 0.01 ħ/E_max of the grid",
    ),
    Key::new(
        "sample_every",
        "10",
        "record observables every this many steps",
    ),
    Key::new(
        "absorbing_width",
        "0",
        "width of the absorbing edge layer in cells; 0 disables it",
    ),
    Key::new(
        "absorbing_rate",
        "1",
        "peak loss rate of the absorbing layer in units of ω",
    ),
];

pub const COLUMNS: [&str; 8] = [
    "step",
    "time_s",
    "norm",
    "kinetic_J",
    "potential_J",
    "interaction_J",
    "total_J",
    "peak_density_m2",
];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let q: u32 = cfg.parse("q", "a positive integer")?;
    let lambda0 = cfg.positive("lambda0_nm")? * 1e-9;
    // Temperature does not enter the field dynamics.
    let geom =
        CavityGeometry::from_cutoff(q, cfg.positive("n")?, lambda0, cfg.positive("R_m")?, 300.0)?;
    let particle = PhotonParticle::from_geometry(&geom);
    let (mass, omega, l) = (
        particle.mass,
        particle.trap_omega,
        particle.oscillator_length(),
    );

    let grid = Grid2D::square(cfg.usize("grid")?, cfg.positive("half_width")? * l)
        .map_err(|e| cfg.invalid("grid", e.to_string()))?;
    let norm = cfg.positive("norm")?;
    let g = cfg.f64("interaction")? * HBAR * HBAR / (mass * norm);
    let gain = cfg.f64("gain")? * omega;
    let saturation = cfg.f64("saturation")? * omega * l * l;
    let offset = cfg.f64("offset")? * l;
    let period = 2.0 * std::f64::consts::PI / omega;
    let t_end = cfg.positive("periods")? * period;

    let potential = Potential::Harmonic { omega };
    let conservative = GpeParams::conservative(mass, potential.clone(), g, 1.0, 1.0);
    let dt = match cfg.optional("dt") {
        Some(_) => cfg.positive("dt")? / omega,
        None => conservative.suggested_dt(&grid),
    };

    let gaussian = ComplexField2D::from_fn(grid, |x, y| {
        let r2 = (x - offset).powi(2) + y * y;
        Complex64::new((-r2 / (2.0 * l * l)).exp(), 0.0)
    });
    let mut initial = match cfg.raw("initial") {
        "gaussian" => gaussian,
        "ground" => {
            // The ground state of the displaced trap is the displaced ground state.
            let displaced = GpeParams {
                potential: Potential::custom(move |x, y| {
                    0.5 * mass * omega * omega * ((x - offset).powi(2) + y * y)
                }),
                ..conservative.clone()
            };
            ground_state(&gaussian, &displaced, norm)?
        }
        other => bail!(cfg.invalid(
            "initial",
            format!("expected ground or gaussian, got {other:?}")
        )),
    };
    initial.set_norm(norm);

    let width = cfg.usize("absorbing_width")?;
    let boundary = if width == 0 {
        Boundary::Periodic
    } else {
        Boundary::Absorbing {
            width,
            rate: cfg.positive("absorbing_rate")? * omega,
        }
    };
    let params = GpeParams {
        dt,
        t_end,
        ..conservative
    }
    .with_drive(gain, saturation)
    .with_boundary(boundary)
    .with_sampling(cfg.usize("sample_every")?);

    let run = evolve(&initial, &params)?;

    let mut report = Report::default();
    let mut table = Table::new(&COLUMNS);
    for s in &run.samples {
        let o = s.observables;
        table.row(&[
            s.step as f64,
            s.time,
            o.norm,
            o.kinetic,
            o.potential,
            o.interaction,
            o.total,
            o.peak_density,
        ]);
    }
    let first = run.samples[0].observables;
    let last = run.samples.last().map(|s| s.observables).unwrap_or(first);
    report.result("mass_kg", mass);
    report.result("omega_rad_s", omega);
    report.result("oscillator_length_m", l);
    report.result("dt_s", params.dt);
    report.result("steps", run.samples.last().map_or(0, |s| s.step) as f64);
    report.result("final_norm", last.norm);
    report.result("relative_norm_change", (last.norm / first.norm - 1.0).abs());
    report.result(
        "relative_energy_change",
        (last.total / first.total - 1.0).abs(),
    );

    let mut field_csv = Vec::new();
    run.field.write_csv(&mut field_csv)?;
    let mut pgm = Vec::new();
    run.field.write_density_pgm(&mut pgm)?;
    report.push(Artifact::csv("gpe_observables.csv", table));
    report.push(Artifact::csv_text("gpe_field.csv", field_csv));
    report.push(Artifact::other("gpe_density.pgm", pgm));

    let mut plot = Plot::new(
        "Photon number and energy per photon",
        "time (trap periods)",
        "relative to initial value",
        Scale::Linear,
        Scale::Linear,
    );
    plot.line(
        "norm",
        run.samples
            .iter()
            .map(|s| (s.time / period, s.observables.norm / first.norm))
            .collect(),
    );
    plot.line(
        "energy per photon",
        run.samples
            .iter()
            .map(|s| {
                let o = s.observables;
                (
                    s.time / period,
                    (o.total / o.norm) / (first.total / first.norm),
                )
            })
            .collect(),
    );
    report.push(Artifact::svg("gpe_observables.svg", plot.render()));
    Ok(report)
}
