//! Derived photon-gas parameters of a curved-mirror microcavity.

use anyhow::Result;
use photon_condensate::bose::{critical_number, TrapSpectrum};
use photon_condensate::cavity::{effective_mass, reduced_spacing, trap_frequency, CavityGeometry};

use crate::config::{Key, RunConfig};
use crate::output::{Artifact, Report, Table};

pub const KEYS: &[Key] = &[
    Key::new("q", "8", "longitudinal mode number"),
    Key::new(
        "n",
        "1.44",
        "refractive indices of the medium, comma separated",
    ),
    Key::new(
        "lambda0_nm",
        "580",
        "cutoff wavelength in nm (ignored when L0_um is set)",
    ),
    Key::new(
        "L0_um",
        "",
        "on-axis cavity length in µm; overrides lambda0_nm",
    ),
    Key::new("R_m", "0.5", "mirror radius of curvature in m"),
    Key::new("T_K", "300", "temperature in K"),
];

pub const COLUMNS: [&str; 8] = [
    "n",
    "lambda0_m",
    "L0_m",
    "mass_kg",
    "omega_rad_s",
    "nu_Hz",
    "x",
    "N_C",
];

/// Geometry for one refractive index from the resolved keys.
pub fn geometry(cfg: &RunConfig, n: f64) -> Result<CavityGeometry> {
    let q: u32 = cfg.parse("q", "a positive integer")?;
    let radius = cfg.positive("R_m")?;
    let temperature = cfg.positive("T_K")?;
    let geom = match cfg.optional("L0_um") {
        Some(_) => {
            CavityGeometry::from_length(q, n, cfg.positive("L0_um")? * 1e-6, radius, temperature)?
        }
        None => CavityGeometry::from_cutoff(
            q,
            n,
            cfg.positive("lambda0_nm")? * 1e-9,
            radius,
            temperature,
        )?,
    };
    if !geom.harmonic_valid() {
        log::warn!(
            "mirror radius {radius} m is not much larger than the cavity length {} m; the harmonic trap approximation is poor",
            geom.length_l0()
        );
    }
    Ok(geom)
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::default();
    let mut table = Table::new(&COLUMNS);
    for n in cfg.list("n")? {
        let geom = match geometry(cfg, n) {
            Ok(g) => g,
            Err(e) => {
                report.failures.push(format!("n = {n}: {e}"));
                continue;
            }
        };
        let omega = trap_frequency(&geom);
        let x = reduced_spacing(&geom);
        let nc = critical_number(&TrapSpectrum::new(x)?);
        table.row(&[
            n,
            geom.cutoff_lambda0(),
            geom.length_l0(),
            effective_mass(&geom),
            omega,
            omega / (2.0 * std::f64::consts::PI),
            x,
            nc,
        ]);
        report.result(format!("nu_Hz_n{n}"), omega / (2.0 * std::f64::consts::PI));
        report.result(format!("critical_number_n{n}"), nc);
    }
    report.push(Artifact::csv("cavity.csv", table));
    Ok(report)
}
