//! Helpers shared by the integration suites.

use opdyn_core::dynamics::{sample_series, OpinionState, PlatformParams};
use opdyn_core::graph::BlockLabel;
use opdyn_core::network::{
    concentration_check, generate_sbm, integrate_envelopes, ConcentrationCheck, SbmConfig,
};
use opdyn_core::Result;

pub struct SandwichParams {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub x_l: f64,
    pub x_r: f64,
    pub epsilon: f64,
    pub horizon: f64,
    pub sample_dt: f64,
}

pub struct SandwichOutcome {
    pub check: ConcentrationCheck,
    /// None when the graph was outside the concentration set (sandwich not
    /// applicable); Some(worst violation) otherwise.
    pub worst_violation: Option<f64>,
}

/// Runs the full-network simulation from identical per-block starts and
/// compares every agent, at every sampled time, against the envelope ODE
/// bounds for the same delta.
pub fn envelope_sandwich(cfg: &SbmConfig, p: &SandwichParams) -> Result<SandwichOutcome> {
    let graph = generate_sbm(cfg)?;
    let check = concentration_check(&graph, cfg, p.delta)?;
    if !check.in_set {
        return Ok(SandwichOutcome { check, worst_violation: None });
    }
    let env = integrate_envelopes(
        p.a, p.b, cfg.p, cfg.q, p.delta, p.x_l, p.x_r, p.epsilon, p.horizon, 0.01,
    )?;
    let x0: Vec<f64> = graph
        .labels()
        .iter()
        .map(|l| match l {
            BlockLabel::L => p.x_l,
            _ => p.x_r,
        })
        .collect();
    let platform = PlatformParams::uniform(p.b, p.epsilon, graph.agent_count())?;
    let mut worst: f64 = 0.0;
    sample_series(
        &OpinionState::at_origin(x0),
        &graph,
        &platform,
        0.01,
        p.horizon,
        p.sample_dt,
        |t, x| {
            let k = ((t / env.step).round() as usize).min(env.states.len() - 1);
            let st = &env.states[k];
            for (i, &xi) in x.iter().enumerate() {
                let (lo, hi) = match graph.labels()[i] {
                    BlockLabel::L => (st.xunder_l, st.xbar_l),
                    _ => (st.xunder_r, st.xbar_r),
                };
                worst = worst.max(lo - xi).max(xi - hi);
            }
        },
    )?;
    Ok(SandwichOutcome { check, worst_violation: Some(worst) })
}

