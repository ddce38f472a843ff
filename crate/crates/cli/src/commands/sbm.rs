use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Subcommand};

use opdyn_core::dynamics::{
    integrate_until_settled, sample_series, OpinionState, PlatformParams, SettleOptions,
};
use opdyn_core::experiments::metrics;
use opdyn_core::network::{
    concentration_check, generate_sbm, generate_sbm_with_rng, load_labeled_graph, write_edge_list,
    write_labels, SbmConfig,
};
use opdyn_core::rng::trial_rng;

use crate::CmdResult;

use super::{print_json, NormalizationArg};

#[derive(Subcommand)]
pub enum SbmCmd {
    /// Draw one realization and write edge-list + labels files
    Generate(GenerateArgs),
    /// Degree-concentration membership test of a generated graph (JSON)
    Check(CheckArgs),
    /// Integrate one trajectory on a fresh draw; writes a
    /// t,polarization,extremism CSV and prints the equilibrium report
    Simulate(SimulateArgs),
}

#[derive(Args)]
pub struct SbmArgs {
    /// Agents per block (the graph has 2n nodes)
    #[arg(long)]
    pub n: usize,
    /// Same-block edge probability
    #[arg(long)]
    pub p: f64,
    /// Cross-block edge probability
    #[arg(long)]
    pub q: f64,
    #[arg(long, value_enum, default_value = "row-normalized")]
    pub normalization: NormalizationArg,
    /// Influence budget (row-normalized) or per-edge weight (unit-weight)
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long)]
    pub seed: u64,
}

impl SbmArgs {
    fn config(&self) -> SbmConfig {
        SbmConfig {
            n: self.n,
            p: self.p,
            q: self.q,
            normalization: self.normalization.into(),
            a: self.a,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub sbm: SbmArgs,
    #[arg(long)]
    pub out_edges: PathBuf,
    #[arg(long)]
    pub out_labels: PathBuf,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Edge-list file (whitespace-separated pairs, # comments)
    #[arg(long)]
    pub edges: PathBuf,
    /// Labels file (node_id L|R per line)
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    /// Relative band half-width
    #[arg(long)]
    pub delta: f64,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sbm: SbmArgs,
    /// Platform strength
    #[arg(long)]
    pub b: f64,
    /// Initial opinions: L ~ Unif[-h, 0], R ~ Unif[0, h]
    #[arg(long, default_value_t = 2.0)]
    pub h: f64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Series horizon (the settle check also stops here)
    #[arg(long, default_value_t = 20.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    #[arg(long, default_value_t = 0.1)]
    pub sample_dt: f64,
    /// Metrics CSV path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cmd: SbmCmd) -> CmdResult {
    match cmd {
        SbmCmd::Generate(args) => {
            let graph = generate_sbm(&args.sbm.config())?;
            let mut ew = BufWriter::new(fs::File::create(&args.out_edges)?);
            write_edge_list(&mut ew, &graph, None)?;
            ew.flush()?;
            let mut lw = BufWriter::new(fs::File::create(&args.out_labels)?);
            write_labels(&mut lw, &graph, None)?;
            lw.flush()?;
            Ok(())
        }
        SbmCmd::Check(args) => {
            let edges = BufReader::new(fs::File::open(&args.edges)?);
            let labels = BufReader::new(fs::File::open(&args.labels)?);
            let loaded = load_labeled_graph(
                edges,
                labels,
                opdyn_core::graph::Normalization::UnitWeight,
                1.0,
            )?;
            let cfg = SbmConfig {
                n: args.n,
                p: args.p,
                q: args.q,
                normalization: opdyn_core::graph::Normalization::UnitWeight,
                a: 1.0,
                seed: 0,
            };
            print_json(&concentration_check(&loaded.graph, &cfg, args.delta)?)
        }
        SbmCmd::Simulate(args) => {
            let cfg = args.sbm.config();
            cfg.validate()?;
            // same draw discipline as experiment trials: graph, then opinions
            let mut rng = trial_rng(cfg.seed, 0);
            let graph =
                generate_sbm_with_rng(cfg.n, cfg.p, cfg.q, cfg.normalization, cfg.a, &mut rng)?;
            let intervals = opdyn_core::experiments::BlockIntervals::spread(args.h);
            let x0 = opdyn_core::experiments::draw_initial(graph.labels(), &intervals, &mut rng)?;
            let platform = PlatformParams::uniform(args.b, args.epsilon, graph.agent_count())?;
            let state = OpinionState::at_origin(x0);
            let mut w = BufWriter::new(fs::File::create(&args.out)?);
            writeln!(w, "t,polarization,extremism")?;
            sample_series(
                &state,
                &graph,
                &platform,
                args.step,
                args.horizon,
                args.sample_dt,
                |t, x| {
                    let pol = metrics::polarization(x, graph.labels()).unwrap_or(0.0);
                    let _ = writeln!(w, "{t},{pol},{}", metrics::extremism(x));
                },
            )?;
            w.flush()?;
            let settled = integrate_until_settled(
                &state,
                &graph,
                &platform,
                args.step,
                &SettleOptions {
                    tol: args.tol,
                    window: args.window,
                    horizon: args.horizon,
                    early_consensus_exit: true,
                },
            )?;
            print_json(&settled.report)
        }
    }
}
