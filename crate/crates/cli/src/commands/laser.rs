//! Microlaser input-output curves, threshold estimates and optional
//! time-domain relaxation.

use anyhow::Result;
use photon_condensate::microlaser::{
    integrate, photons_at, threshold, MicrolaserParams, MicrolaserState, ThresholdConvention,
};
use photon_condensate::Error;
use rayon::prelude::*;

use crate::config::{Key, RunConfig};
use crate::output::{tag, Artifact, Report, Table};
use crate::svg::{Plot, Scale};

pub const KEYS: &[Key] = &[
    Key::new(
        "beta",
        "1e-4,1e-3,0.01,0.1,1",
        "spontaneous-emission fractions, comma separated",
    ),
    Key::new(
        "rho_min",
        "0.01",
        "smallest pump rate in units of the cavity loss rate",
    ),
    Key::new("rho_max", "1000000", "largest pump rate"),
    Key::new("points", "401", "log-spaced pump points"),
    Key::new(
        "dynamics",
        "false",
        "also integrate the rate equations from an empty cavity",
    ),
    Key::new("gamma", "1", "excitation decay rate, for dynamics"),
    Key::new("kappa", "1", "cavity loss rate, for dynamics"),
    Key::new(
        "dynamics_rho",
        "10",
        "pump rate for dynamics, in units of kappa",
    ),
    Key::new(
        "t_end",
        "",
        "dynamics duration; empty means 50/min(gamma, kappa)",
    ),
];

pub const COLUMNS: [&str; 2] = ["rho", "P"];
pub const DYNAMICS_COLUMNS: [&str; 3] = ["time", "P", "N"];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let betas = cfg.list("beta")?;
    if let Some(b) = betas.iter().find(|&&b| !(b > 0.0 && b <= 1.0)) {
        return Err(cfg.invalid("beta", format!("{b} is outside (0, 1]")).into());
    }
    let grid = cfg.log_grid("rho_min", "rho_max", "points")?;
    let dynamics = cfg.flag("dynamics")?;

    let curves: Vec<Vec<_>> = betas
        .par_iter()
        .map(|&b| grid.iter().map(|&rho| photons_at(b, rho)).collect())
        .collect();

    let mut report = Report::default();
    let mut plot = Plot::new(
        "Microlaser steady state",
        "pump rate ρ",
        "mean photon number",
        Scale::Log,
        Scale::Log,
    );
    for (&beta, curve) in betas.iter().zip(&curves) {
        let mut table = Table::new(&COLUMNS);
        let mut points = Vec::new();
        for (&rho, p) in grid.iter().zip(curve) {
            match p {
                Ok(p) => {
                    table.row(&[rho, *p]);
                    points.push((rho, *p));
                }
                Err(e) => report
                    .failures
                    .push(format!("beta = {beta}, rho = {rho}: {e}")),
            }
        }
        for (name, convention) in [
            ("curvature", ThresholdConvention::Curvature),
            ("unit_population", ThresholdConvention::UnitPopulation),
        ] {
            let key = format!("threshold_{name}_beta{}", tag(beta));
            match threshold(beta, &grid, convention) {
                Ok(t) => report.result(key, t),
                Err(Error::NoKnee { .. }) => report.note(key, "none"),
                Err(e) => report
                    .failures
                    .push(format!("beta = {beta}: {name} threshold: {e}")),
            }
        }
        report.push(Artifact::csv(format!("laser_beta{}.csv", tag(beta)), table));
        plot.line(format!("β = {beta}"), points);
    }
    report.push(Artifact::svg("laser_curves.svg", plot.render()));

    if dynamics {
        run_dynamics(cfg, &betas, &mut report)?;
    }
    Ok(report)
}

fn run_dynamics(cfg: &RunConfig, betas: &[f64], report: &mut Report) -> Result<()> {
    let gamma = cfg.positive("gamma")?;
    let kappa = cfg.positive("kappa")?;
    let rho = cfg.positive("dynamics_rho")?;
    let t_end = match cfg.optional("t_end") {
        Some(_) => cfg.positive("t_end")?,
        None => 50.0 / gamma.min(kappa),
    };
    let runs: Vec<_> = betas
        .par_iter()
        .map(|&beta| {
            let params = MicrolaserParams::with_rho(beta, gamma, kappa, rho)?;
            let empty = MicrolaserState {
                photons: 0.0,
                excitations: 0.0,
                time: 0.0,
            };
            integrate(&params, empty, t_end, t_end / 200.0)
        })
        .collect();
    let mut plot = Plot::new(
        "Relaxation from an empty cavity",
        "time",
        "mean photon number",
        Scale::Linear,
        Scale::Linear,
    );
    for (&beta, run) in betas.iter().zip(runs) {
        match run {
            Ok(traj) => {
                let mut table = Table::new(&DYNAMICS_COLUMNS);
                for s in &traj {
                    table.row(&[s.time, s.photons, s.excitations]);
                }
                plot.line(
                    format!("β = {beta}"),
                    traj.iter().map(|s| (s.time, s.photons)).collect(),
                );
                report.push(Artifact::csv(
                    format!("laser_dynamics_beta{}.csv", tag(beta)),
                    table,
                ));
            }
            Err(e) => report
                .failures
                .push(format!("beta = {beta}: dynamics: {e}")),
        }
    }
    report.push(Artifact::svg("laser_dynamics.svg", plot.render()));
    Ok(())
}
