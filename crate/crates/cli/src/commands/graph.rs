use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::json;

use opdyn_core::experiments::{
    run_extremism_experiment, write_csv, BlockIntervals, ExperimentConfig, IntegratorSettings,
    NetworkSource,
};

use crate::manifest::{stamp, write_manifest, ManifestBuilder};
use crate::{CmdError, CmdResult};

use super::{out_dir, NormalizationArg};

#[derive(Subcommand)]
pub enum GraphCmd {
    /// Monte Carlo trials on a fixed labeled graph (opinions redrawn per
    /// trial); writes per-b extremism/consensus cells, per-trial rows, and a
    /// manifest
    Simulate(SimulateArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Edge-list file (whitespace-separated integer pairs, # comments)
    #[arg(long)]
    pub edges: PathBuf,
    /// Labels file (node_id L|R per line)
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_enum, default_value = "row-normalized")]
    pub normalization: NormalizationArg,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Platform strengths to sweep (repeat the flag or comma-separate)
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<f64>,
    /// Initial opinions: L ~ Unif[-h, 0], R ~ Unif[0, h]
    #[arg(long, default_value_t = 2.0)]
    pub h: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 500.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Pin the filename timestamp token
    #[arg(long)]
    pub stamp: Option<String>,
}

pub fn run(cmd: GraphCmd) -> CmdResult {
    let GraphCmd::Simulate(args) = cmd;
    let dir = out_dir(args.out_dir.clone());
    fs::create_dir_all(&dir)?;
    let token = stamp(args.stamp.as_deref());
    let builder = ManifestBuilder::start();

    let cfg = ExperimentConfig {
        network: NetworkSource::File {
            edges: args.edges.clone(),
            labels: args.labels.clone(),
            normalization: args.normalization.into(),
            a: args.a,
        },
        b_grid: args.b.clone(),
        h_grid: None,
        initial: Some(BlockIntervals::spread(args.h)),
        trials: args.trials,
        seed: args.seed,
        integrator: IntegratorSettings {
            epsilon: args.epsilon,
            step: args.step,
            horizon: args.horizon,
            tol: args.tol,
            ..IntegratorSettings::default()
        },
    };
    cfg.validate()?;
    let res = run_extremism_experiment(&cfg)?;

    let cells_csv = dir.join(format!("graph-simulate_{token}.csv"));
    let trials_csv = dir.join(format!("graph-simulate_{token}_trials.csv"));
    {
        let mut w = BufWriter::new(fs::File::create(&cells_csv)?);
        write_csv(&mut w, &res.cells)?;
    }
    {
        let mut w = BufWriter::new(fs::File::create(&trials_csv)?);
        write_csv(&mut w, &res.outcomes)?;
    }
    let total = args.trials * args.b.len() as u64;
    let manifest = builder.finish(
        &cfg,
        cfg.seed,
        vec![cells_csv, trials_csv],
        res.failed_trials,
        total,
        json!({ "agents": "fixed-graph", "b_cells": res.cells.len() }),
    )?;
    write_manifest(&dir.join(format!("graph-simulate_{token}.json")), &manifest)?;

    if total > 0 && res.failed_trials as f64 > 0.01 * total as f64 {
        return Err(CmdError {
            code: 4,
            msg: format!("{} of {total} trials failed", res.failed_trials),
        });
    }
    Ok(())
}
