//! One Monte Carlo trial: draw a network (or reuse the fixed one), draw
//! initial opinions, integrate to the settle criterion, record metrics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    integrate_until_settled, EquilibriumKind, OpinionState, PlatformParams, SettleOptions,
};
use crate::error::{Error, Result};
use crate::graph::{BlockLabel, InfluenceGraph, Normalization};
use crate::network::generate_sbm_with_rng;
use crate::rng::trial_rng;

use super::config::{BlockIntervals, IntegratorSettings};
use super::metrics;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub b: f64,
    pub h: Option<f64>,
    pub kind: EquilibriumKind,
    pub converged: bool,
    /// Polarization of the limit when converged, else of the horizon state.
    pub polarization: f64,
    pub extremism: f64,
    pub settle_time: Option<f64>,
}

#[derive(Clone, Copy)]
pub(crate) enum TrialGraph<'a> {
    Sbm { n: usize, p: f64, q: f64, normalization: Normalization, a: f64 },
    Fixed(&'a InfluenceGraph),
}

pub(crate) struct TrialContext<'a> {
    pub graph: TrialGraph<'a>,
    pub b: f64,
    pub h: Option<f64>,
    pub intervals: BlockIntervals,
    pub integ: &'a IntegratorSettings,
    pub seed: u64,
}

/// Per-block uniform initial opinions, drawn in agent-index order.
pub fn draw_initial<R: Rng>(
    labels: &[BlockLabel],
    intervals: &BlockIntervals,
    rng: &mut R,
) -> Result<Vec<f64>> {
    labels
        .iter()
        .map(|lab| match lab {
            BlockLabel::L => Ok(rng.gen_range(intervals.l.0..intervals.l.1)),
            BlockLabel::R => Ok(rng.gen_range(intervals.r.0..intervals.r.1)),
            BlockLabel::Unlabeled => {
                Err(Error::invalid("experiment networks must label every agent L or R"))
            }
        })
        .collect()
}

pub(crate) fn run_trial(ctx: &TrialContext, stream: u64, trial_id: u64) -> Result<TrialOutcome> {
    let mut rng = trial_rng(ctx.seed, stream);
    let drawn;
    let graph: &InfluenceGraph = match ctx.graph {
        TrialGraph::Sbm { n, p, q, normalization, a } => {
            drawn = generate_sbm_with_rng(n, p, q, normalization, a, &mut rng)?;
            &drawn
        }
        TrialGraph::Fixed(g) => g,
    };
    let x0 = draw_initial(graph.labels(), &ctx.intervals, &mut rng)?;
    let platform = PlatformParams::uniform(ctx.b, ctx.integ.epsilon, graph.agent_count())?;
    let opts = SettleOptions {
        tol: ctx.integ.tol,
        window: ctx.integ.window,
        horizon: ctx.integ.horizon,
        early_consensus_exit: true,
    };
    let settled =
        integrate_until_settled(&OpinionState::at_origin(x0), graph, &platform, ctx.integ.step, &opts)?;
    let polarization = metrics::polarization(&settled.state, graph.labels()).unwrap_or(0.0);
    let extremism = metrics::extremism(&settled.state);
    Ok(TrialOutcome {
        trial: trial_id,
        b: ctx.b,
        h: ctx.h,
        kind: settled.report.kind,
        converged: settled.report.kind.is_converged(),
        polarization,
        extremism,
        settle_time: settled.report.settle_time,
    })
}
