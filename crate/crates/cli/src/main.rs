//! `photon-condensate`: parameter sweeps and figures for photon
//! condensates and microlasers.
//!
//! Every command takes its parameters as `--key value` flags or from a
//! `--config` file of `key = value` lines (flags win), writes CSV and/or SVG
//! files into the output directory together with a `manifest.txt` that can
//! be passed back as `--config` to repeat the run. Exit status is 0 on
//! success, 2 if some sweep points failed and 1 on a hard error.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::parser::ValueSource;
use clap::{value_parser, Arg, ArgMatches};

use config::{load_config, Command, Format, RunConfig};

const OUT_ENV: &str = "PHOTON_CONDENSATE_OUT";

fn cli() -> clap::Command {
    let common = [
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .value_parser(value_parser!(PathBuf))
            .help("key = value file; command-line flags override it"),
        Arg::new("out")
            .long("out")
            .value_name("DIR")
            .env(OUT_ENV)
            .default_value("out")
            .value_parser(value_parser!(PathBuf))
            .help("output directory"),
        Arg::new("format")
            .long("format")
            .value_parser(["csv", "svg", "both"])
            .help("which artifacts to write [default: both]"),
        Arg::new("jobs")
            .long("jobs")
            .short('j')
            .value_name("N")
            .value_parser(value_parser!(usize))
            .help("worker threads; 0 uses every core [default: 0]"),
    ];
    let mut app = clap::Command::new("photon-condensate")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Equilibrium photon condensates, microlasers and the Kennard-Stepanov relation")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for command in Command::ALL {
        let mut sub = clap::Command::new(command.name())
            .about(command.about())
            .args(common.iter().cloned());
        for key in command.keys() {
            let help = match key.default {
                "" => key.help.to_string(),
                d => format!("{} [default: {d}]", key.help),
            };
            sub = sub.arg(
                Arg::new(key.name)
                    .long(key.name)
                    .value_name("VALUE")
                    .allow_negative_numbers(true)
                    .help(help),
            );
        }
        app = app.subcommand(sub);
    }
    app
}

fn resolve(command: Command, matches: &ArgMatches) -> Result<RunConfig> {
    let out = matches
        .get_one::<PathBuf>("out")
        .cloned()
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut cfg = RunConfig::defaults(command, out);
    if let Some(path) = matches.get_one::<PathBuf>("config") {
        let file = load_config(path, command)?;
        for (key, value) in &file.params {
            cfg.set(key, value)?;
        }
        if let Some(format) = file.format {
            cfg.format = format;
        }
    }
    for key in command.keys() {
        if matches.value_source(key.name) == Some(ValueSource::CommandLine) {
            let value: &String = matches.get_one(key.name).expect("value present");
            cfg.set(key.name, value)?;
        }
    }
    if let Some(format) = matches.get_one::<String>("format") {
        cfg.format = format.parse::<Format>()?;
    }
    cfg.jobs = matches.get_one::<usize>("jobs").copied().unwrap_or(0);
    Ok(cfg)
}

fn run(command: Command, matches: &ArgMatches) -> Result<bool> {
    let cfg = resolve(command, matches)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .context("starting worker pool")?;
    let report = pool.install(|| commands::run(&cfg))?;
    let written = output::write_all(&cfg, &report)?;
    for failure in &report.failures {
        log::error!("{failure}");
    }
    println!(
        "{}: wrote {} files to {}",
        command,
        written.len(),
        cfg.output_dir.display()
    );
    if !report.failures.is_empty() {
        eprintln!("{} points failed; see manifest.txt", report.failures.len());
    }
    Ok(report.failures.is_empty())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors, which here means a partial run.
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command: Command = name.parse().expect("subcommands mirror Command::ALL");
    match run(command, sub) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
