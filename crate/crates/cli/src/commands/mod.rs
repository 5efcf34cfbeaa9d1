pub mod bec;
pub mod cavity;
pub mod compare;
pub mod gpe;
pub mod ks;
pub mod laser;

use anyhow::Result;

use crate::config::{Command, RunConfig};
use crate::output::Report;

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::BecCurve => bec::run(cfg),
        Command::LaserCurve => laser::run(cfg),
        Command::Compare => compare::run(cfg),
        Command::Cavity => cavity::run(cfg),
        Command::Gpe => gpe::run(cfg),
        Command::KsFit => ks::run(cfg),
    }
}
