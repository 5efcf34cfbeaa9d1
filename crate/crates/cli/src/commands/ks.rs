//! Kennard-Stepanov fit of absorption and fluorescence spectra.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use photon_condensate::spectro::{
    fit_ks_with, ks_log_ratio_with, load_spectra_with_floor, with_multiplicative_noise, KsOptions,
    SyntheticSpectra,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Key, RunConfig};
use crate::output::{Artifact, Report, Table};
use crate::svg::{Plot, Scale};

pub const KEYS: &[Key] = &[
    Key::new(
        "input",
        "",
        "CSV with wavelength_nm,absorption,fluorescence; empty uses a synthetic dye spectrum",
    ),
    Key::new(
        "temperature",
        "300",
        "temperature of the synthetic spectrum in K",
    ),
    Key::new(
        "noise",
        "0",
        "relative multiplicative noise added to the spectra",
    ),
    Key::new("seed", "0", "noise seed"),
    Key::new(
        "floor",
        "0.001",
        "rows where absorption or fluorescence falls below this are ignored",
    ),
    Key::new(
        "density_of_states",
        "false",
        "include the ε³ density-of-states factor",
    ),
];

pub const POINT_COLUMNS: [&str; 3] = ["energy_eV", "log_ratio", "fit"];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let floor = cfg.f64("floor")?;
    let mut pair = match cfg.optional("input") {
        Some(path) => load_spectra_with_floor(Path::new(path), floor)?,
        None => SyntheticSpectra {
            temperature: cfg.positive("temperature")?,
            ..SyntheticSpectra::default()
        }
        .generate_with_floor(floor)?,
    };
    let noise = cfg.f64("noise")?;
    if noise < 0.0 {
        return Err(cfg.invalid("noise", "must be non-negative").into());
    }
    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.parse("seed", "a non-negative integer")?);
        pair = with_multiplicative_noise(&pair, noise, &mut rng)?;
    }
    let options = KsOptions {
        density_of_states: cfg.flag("density_of_states")?,
    };
    let fit = fit_ks_with(&pair, options)?;

    let mut report = Report::default();
    report.result("temperature_K", fit.temperature_fit);
    report.result("zpl_energy_eV", fit.zpl_energy);
    report.result("zpl_wavelength_nm", fit.zpl_wavelength);
    report.result("r_squared", fit.r_squared);
    report.result("slope_per_eV", fit.slope);
    report.result("intercept", fit.intercept);
    report.result("points", fit.points as f64);
    report.result("range_min_nm", fit.valid_range.0);
    report.result("range_max_nm", fit.valid_range.1);

    let mut text = String::new();
    for (key, value) in &report.results {
        let _ = writeln!(text, "{key} = {value}");
    }
    report.push(Artifact::other("report.txt", text.into_bytes()));

    let data = ks_log_ratio_with(&pair, options);
    let mut table = Table::new(&POINT_COLUMNS);
    for &(e, r) in &data {
        table.row(&[e, r, fit.line(e)]);
    }
    report.push(Artifact::csv("ks_points.csv", table));
    report.push(Artifact::csv_text(
        "spectra.csv",
        pair.to_csv().into_bytes(),
    ));

    let mut plot = Plot::new(
        &format!("Kennard-Stepanov fit: T = {:.1} K", fit.temperature_fit),
        "photon energy (eV)",
        "ln(A/F)",
        Scale::Linear,
        Scale::Linear,
    );
    plot.markers("data", data.clone());
    plot.line("fit", data.iter().map(|&(e, _)| (e, fit.line(e))).collect());
    report.push(Artifact::svg("ks_fit.svg", plot.render()));
    Ok(report)
}
