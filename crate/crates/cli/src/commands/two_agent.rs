use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Subcommand};

use opdyn_core::dynamics::{
    integrate_until_settled, sample_series, OpinionState, SettleOptions,
};
use opdyn_core::two_agent::{band_crossing, classify, region_grid, TwoAgentSystem};

use crate::{CmdError, CmdResult};

use super::print_json;

#[derive(Subcommand)]
pub enum TwoAgentCmd {
    /// Classify the limit behavior from the initial opinions (JSON to stdout)
    Classify(SystemArgs),
    /// Integrate one trajectory; writes t,x1,x2 CSV and prints the
    /// equilibrium report as JSON
    Simulate(SimulateArgs),
    /// Classify a whole lattice of initial opinions; writes x1_0,x2_0,kind CSV
    Region(RegionArgs),
    /// Eigen-decomposition of the band-crossing dynamics (a = 1; JSON)
    Band(BandArgs),
}

#[derive(Args)]
pub struct SystemArgs {
    /// Mutual influence weight
    #[arg(long)]
    pub a: f64,
    /// Platform strength
    #[arg(long)]
    pub b: f64,
    /// Initial opinion of agent 1
    #[arg(long, allow_negative_numbers = true)]
    pub x1: f64,
    /// Initial opinion of agent 2
    #[arg(long, allow_negative_numbers = true)]
    pub x2: f64,
    /// Interpolation half-width of the saturating platform signal
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Requested integrator step (auto-refined near a narrow band)
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Simulation horizon
    #[arg(long, default_value_t = 50.0)]
    pub horizon: f64,
    /// Convergence tolerance for the residual-plus-movement criterion
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Trailing movement window
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    /// CSV sampling interval; every accepted step when 0
    #[arg(long, default_value_t = 0.01)]
    pub sample_dt: f64,
    /// Trajectory CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RegionArgs {
    /// Ratio b/a (sets a = 1, b = ratio); alternative to --a/--b
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub ratio: Option<f64>,
    #[arg(long, requires = "b")]
    pub a: Option<f64>,
    #[arg(long, requires = "a")]
    pub b: Option<f64>,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub max: f64,
    /// Lattice points per axis
    #[arg(long, default_value_t = 101)]
    pub res: usize,
    /// Region CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BandArgs {
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub epsilon: f64,
    /// Opinion of the upper agent at band entry (must be >= b)
    #[arg(long = "x2-0", allow_negative_numbers = true)]
    pub x2_0: f64,
}

pub fn run(cmd: TwoAgentCmd) -> CmdResult {
    match cmd {
        TwoAgentCmd::Classify(args) => {
            let sys = TwoAgentSystem::new(args.a, args.b, (args.x1, args.x2), args.epsilon)?;
            print_json(&classify(&sys)?)
        }
        TwoAgentCmd::Simulate(args) => {
            let s = &args.system;
            let sys = TwoAgentSystem::new(s.a, s.b, (s.x1, s.x2), s.epsilon)?;
            let graph = sys.graph();
            let platform = sys.platform();
            let x0 = OpinionState::at_origin(vec![s.x1, s.x2]);
            let sample_dt = if args.sample_dt == 0.0 { args.step } else { args.sample_dt };
            let mut w = BufWriter::new(fs::File::create(&args.out)?);
            writeln!(w, "t,x1,x2")?;
            sample_series(&x0, &graph, &platform, args.step, args.horizon, sample_dt, |t, x| {
                // full round-trip decimal formatting
                let _ = writeln!(w, "{t},{},{}", x[0], x[1]);
            })?;
            w.flush()?;
            let settled = integrate_until_settled(
                &x0,
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
        TwoAgentCmd::Region(args) => {
            let (a, b) = match (args.ratio, args.a, args.b) {
                (Some(r), _, _) => (1.0, r),
                (None, Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(CmdError {
                        code: 2,
                        msg: "region needs either --ratio or both --a and --b".into(),
                    })
                }
            };
            let grid = region_grid(a, b, args.min, args.max, args.res)?;
            let mut w = BufWriter::new(fs::File::create(&args.out)?);
            grid.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        TwoAgentCmd::Band(args) => print_json(&band_crossing(args.b, args.epsilon, args.x2_0)?),
    }
}
