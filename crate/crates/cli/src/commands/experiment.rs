use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::json;

use opdyn_core::experiments::{
    self, write_csv, CycleDemo, ExperimentConfig,
};

use crate::manifest::{stamp, write_manifest, ManifestBuilder};
use crate::{CmdError, CmdResult};

use super::out_dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    /// Final-polarization distribution per b, conditional on persistent
    /// disagreement, with the mean-field overlay
    Polarization,
    /// Mean +- sd polarization time series per initial half-width h
    Monotonicity,
    /// Consensus probability per h at fixed b, with 95% intervals
    ConsensusProb,
    /// Extremism quartiles and decomposition per b
    Extremism,
    /// The fixed 4-agent directed-cycle non-convergence demo
    CycleDemo,
}

impl ExperimentName {
    fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Polarization => "polarization",
            ExperimentName::Monotonicity => "monotonicity",
            ExperimentName::ConsensusProb => "consensus-prob",
            ExperimentName::Extremism => "extremism",
            ExperimentName::CycleDemo => "cycle-demo",
        }
    }
}

#[derive(Args)]
pub struct ExperimentCmd {
    /// Which study to run
    #[arg(value_enum)]
    pub name: ExperimentName,
    /// TOML experiment configuration (required except for cycle-demo)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: OPDYN_OUT_DIR or the working directory)
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Override the config seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the config trial count
    #[arg(long)]
    pub trials: Option<u64>,
    /// Pin the filename timestamp token (for reproducible output paths)
    #[arg(long)]
    pub stamp: Option<String>,
}

fn load_config(cmd: &ExperimentCmd) -> CmdResult<ExperimentConfig> {
    let path = cmd.config.as_ref().ok_or_else(|| CmdError {
        code: 2,
        msg: format!("experiment {} requires --config", cmd.name.as_str()),
    })?;
    let text = fs::read_to_string(path).map_err(|e| CmdError {
        code: 2,
        msg: format!("cannot read config {}: {e}", path.display()),
    })?;
    let mut cfg: ExperimentConfig = toml::from_str(&text)?;
    if let Some(seed) = cmd.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cmd.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn csv_path(dir: &Path, name: &str, stamp: &str) -> PathBuf {
    dir.join(format!("{name}_{stamp}.csv"))
}

fn write_rows<T: serde::Serialize>(path: &Path, rows: &[T]) -> CmdResult {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_csv(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

/// Exit code 4 when more than 1% of trials failed.
fn check_failures(failed: u64, total: u64) -> CmdResult {
    if total > 0 && failed as f64 > 0.01 * total as f64 {
        return Err(CmdError {
            code: 4,
            msg: format!("{failed} of {total} trials failed"),
        });
    }
    Ok(())
}

pub fn run(cmd: ExperimentCmd) -> CmdResult {
    let dir = out_dir(cmd.out_dir.clone());
    fs::create_dir_all(&dir)?;
    let token = stamp(cmd.stamp.as_deref());
    let name = cmd.name.as_str();
    let builder = ManifestBuilder::start();
    let csv = csv_path(&dir, name, &token);
    let manifest_path = dir.join(format!("{name}_{token}.json"));

    let (seed, failed, total, summary) = match cmd.name {
        ExperimentName::Polarization => {
            let cfg = load_config(&cmd)?;
            let res = experiments::run_polarization_experiment(&cfg)?;
            write_rows(&csv, &res.csv_rows())?;
            let total = cfg.trials * cfg.b_grid.len() as u64;
            let summary = json!({ "cells": res.cells.len() });
            let manifest = builder.finish(
                &cfg,
                cfg.seed,
                vec![csv.clone()],
                res.failed_trials,
                total,
                summary,
            )?;
            write_manifest(&manifest_path, &manifest)?;
            (cfg.seed, res.failed_trials, total, None)
        }
        ExperimentName::Monotonicity => {
            let cfg = load_config(&cmd)?;
            let res = experiments::run_trajectory_monotonicity(&cfg)?;
            write_rows(&csv, &res.rows)?;
            let total =
                cfg.trials * cfg.h_grid.as_ref().map(|h| h.len()).unwrap_or(0) as u64;
            let manifest = builder.finish(
                &cfg,
                cfg.seed,
                vec![csv.clone()],
                res.failed_trials,
                total,
                serde_json::Value::Null,
            )?;
            write_manifest(&manifest_path, &manifest)?;
            (cfg.seed, res.failed_trials, total, None)
        }
        ExperimentName::ConsensusProb => {
            let cfg = load_config(&cmd)?;
            let res = experiments::run_consensus_probability(&cfg)?;
            write_rows(&csv, &res.cells)?;
            let total =
                cfg.trials * cfg.h_grid.as_ref().map(|h| h.len()).unwrap_or(0) as u64;
            let manifest = builder.finish(
                &cfg,
                cfg.seed,
                vec![csv.clone()],
                res.failed_trials,
                total,
                serde_json::Value::Null,
            )?;
            write_manifest(&manifest_path, &manifest)?;
            (cfg.seed, res.failed_trials, total, None)
        }
        ExperimentName::Extremism => {
            let cfg = load_config(&cmd)?;
            let res = experiments::run_extremism_experiment(&cfg)?;
            write_rows(&csv, &res.cells)?;
            let b_cells = if cfg.b_grid.is_empty() {
                experiments::EXTREMISM_DEFAULT_B.len()
            } else {
                cfg.b_grid.len()
            };
            let total = cfg.trials * b_cells as u64;
            let manifest = builder.finish(
                &cfg,
                cfg.seed,
                vec![csv.clone()],
                res.failed_trials,
                total,
                serde_json::Value::Null,
            )?;
            write_manifest(&manifest_path, &manifest)?;
            (cfg.seed, res.failed_trials, total, None)
        }
        ExperimentName::CycleDemo => {
            let demo = experiments::run_cycle_demo()?;
            write_cycle_trajectory(&csv, &demo)?;
            let summary = serde_json::to_value(demo.summary())?;
            let manifest =
                builder.finish(&json!({}), 0, vec![csv.clone()], 0, 0, summary.clone())?;
            write_manifest(&manifest_path, &manifest)?;
            println!("{}", serde_json::to_string_pretty(&demo.summary())?);
            (0, 0, 0, Some(summary))
        }
    };
    let _ = (seed, summary);
    check_failures(failed, total)
}

fn write_cycle_trajectory(path: &Path, demo: &CycleDemo) -> CmdResult {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "t,x1,x2,x3,x4")?;
    let traj = &demo.trajectory;
    // thin to 0.1 time units to keep the file small
    let every = ((0.1 / traj.step_size()).round() as usize).max(1);
    for k in (0..traj.len()).step_by(every) {
        let x = &traj.states()[k];
        writeln!(w, "{},{},{},{},{}", traj.times()[k], x[0], x[1], x[2], x[3])?;
    }
    w.flush()?;
    Ok(())
}
