//! Side-by-side microlaser and condensate curves at matched parameters.

use anyhow::Result;
use photon_condensate::comparison::{
    comparison_curves, low_density_ground_fraction, smallness_report,
};
use rayon::prelude::*;

use crate::config::{Key, RunConfig};
use crate::output::{tag, Artifact, Report, Table};
use crate::svg::{Plot, Scale};

pub const KEYS: &[Key] = &[
    Key::new(
        "beta",
        "0.1,0.5,0.9,1",
        "spontaneous-emission fractions, comma separated",
    ),
    Key::new(
        "control_min",
        "0.01",
        "smallest control value (pump rate or photon number)",
    ),
    Key::new("control_max", "100", "largest control value"),
    Key::new("points", "201", "log-spaced control points"),
];

pub const COLUMNS: [&str; 4] = ["control", "P_laser", "n_ground_bec", "rel_deviation"];
pub const SUMMARY_COLUMNS: [&str; 7] = [
    "beta",
    "x_matched",
    "slope_error",
    "max_deviation",
    "mode_count",
    "inverse_beta",
    "ratio",
];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let mut betas = cfg.list("beta")?;
    betas.sort_by(f64::total_cmp);
    let grid = cfg.log_grid("control_min", "control_max", "points")?;
    let results: Vec<_> = betas
        .par_iter()
        .map(|&b| Ok((comparison_curves(b, &grid)?, smallness_report(b)?)))
        .collect::<Vec<photon_condensate::Result<_>>>();

    let mut report = Report::default();
    let mut summary = Table::new(&SUMMARY_COLUMNS);
    let mut plot = Plot::new(
        "Microlaser (lines) and condensate (markers)",
        "control parameter",
        "mode population",
        Scale::Log,
        Scale::Log,
    );
    for (&beta, result) in betas.iter().zip(results) {
        let (cmp, small) = match result {
            Ok(r) => r,
            Err(e) => {
                report.failures.push(format!("beta = {beta}: {e}"));
                continue;
            }
        };
        let mut table = Table::new(&COLUMNS);
        for p in &cmp.points {
            table.row(&[p.control, p.laser_photons, p.bec_ground, p.deviation]);
        }
        let slope_error = (low_density_ground_fraction(cmp.x_matched) - beta).abs();
        summary.row(&[
            beta,
            cmp.x_matched,
            slope_error,
            cmp.max_deviation(),
            small.mode_count,
            small.inverse_beta,
            small.ratio,
        ]);
        report.result(format!("x_matched_beta{}", tag(beta)), cmp.x_matched);
        report.result(
            format!("max_deviation_beta{}", tag(beta)),
            cmp.max_deviation(),
        );
        report.push(Artifact::csv(
            format!("compare_beta{}.csv", tag(beta)),
            table,
        ));
        plot.line(
            format!("laser β = {beta}"),
            cmp.points
                .iter()
                .map(|p| (p.control, p.laser_photons))
                .collect(),
        );
        plot.markers(
            format!("BEC x = {:.3}", cmp.x_matched),
            cmp.points
                .iter()
                .step_by(8)
                .map(|p| (p.control, p.bec_ground))
                .collect(),
        );
    }
    report.push(Artifact::csv("compare_summary.csv", summary));
    report.push(Artifact::svg("compare.svg", plot.render()));
    Ok(report)
}
