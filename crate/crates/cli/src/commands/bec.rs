//! Condensate fraction curves for a 2D harmonic trap.

use anyhow::Result;
use photon_condensate::bose::{critical_number, solve_mu, TrapSpectrum};
use rayon::prelude::*;

use crate::config::{Key, RunConfig};
use crate::output::{tag, Artifact, Report, Table};
use crate::svg::{Plot, Scale};

pub const KEYS: &[Key] = &[
    Key::new(
        "x",
        "0.05,0.2,1,5",
        "reduced level spacings ħω/k_BT, comma separated",
    ),
    Key::new("n_min", "0.01", "smallest total photon number"),
    Key::new("n_max", "10000", "largest total photon number"),
    Key::new("points", "241", "log-spaced points per curve"),
];

pub const COLUMNS: [&str; 3] = ["n_total", "n_ground", "mu"];

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let xs = cfg.list("x")?;
    let grid = cfg.log_grid("n_min", "n_max", "points")?;
    let spectra = xs
        .iter()
        .map(|&x| TrapSpectrum::new(x).map_err(|e| cfg.invalid("x", e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;

    let tasks: Vec<(usize, f64)> = (0..xs.len())
        .flat_map(|i| grid.iter().map(move |&n| (i, n)))
        .collect();
    let solved: Vec<_> = tasks
        .par_iter()
        .map(|&(i, n)| solve_mu(&spectra[i], n))
        .collect();

    let mut report = Report::default();
    let mut plot = Plot::new(
        "Ground-state population in a 2D harmonic trap",
        "total photon number",
        "ground-state photon number",
        Scale::Log,
        Scale::Log,
    );
    let mut markers = Vec::new();
    for (i, (&x, spec)) in xs.iter().zip(&spectra).enumerate() {
        let mut table = Table::new(&COLUMNS);
        let mut curve = Vec::new();
        for (&(_, n), state) in tasks.iter().zip(&solved).filter(|((j, _), _)| *j == i) {
            match state {
                Ok(s) => {
                    table.row(&[s.n_total, s.n_ground, s.mu]);
                    curve.push((s.n_total, s.n_ground));
                }
                Err(e) => report.failures.push(format!("x = {x}, n = {n}: {e}")),
            }
        }
        let nc = critical_number(spec);
        report.result(format!("critical_number_x{}", tag(x)), nc);
        if let Ok(s) = solve_mu(spec, nc) {
            markers.push((nc, s.n_ground));
        }
        report.push(Artifact::csv(format!("bec_x{}.csv", tag(x)), table));
        plot.line(format!("x = {x}"), curve);
    }
    plot.markers("N_C", markers);
    report.push(Artifact::svg("bec_curves.svg", plot.render()));
    Ok(report)
}
