//! The Monte Carlo studies: polarization distributions, trajectory
//! monotonicity, consensus probability, extremism decomposition, and the
//! directed-cycle non-convergence demo.

use std::fs;
use std::io::BufReader;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    detect_equilibrium, integrate, integrate_until_settled, sample_series, vector_field,
    EquilibriumKind, EquilibriumReport, OpinionState, PlatformParams, SettleOptions, Trajectory,
};
use crate::error::{Error, Result};
use crate::graph::{BlockLabel, InfluenceGraph, Normalization};
use crate::network::load_labeled_graph;
use crate::parallel;
use crate::two_agent;

use super::config::{BlockIntervals, ExperimentConfig, NetworkSource};
use super::metrics;
use super::trial::{run_trial, TrialContext, TrialGraph, TrialOutcome};

pub(crate) enum ResolvedNetwork {
    Sbm { n: usize, p: f64, q: f64, normalization: Normalization, a: f64 },
    Fixed { graph: InfluenceGraph, normalization: Normalization, a: f64 },
}

impl ResolvedNetwork {
    pub(crate) fn resolve(src: &NetworkSource) -> Result<Self> {
        match src {
            NetworkSource::Sbm { n, p, q, normalization, a } => Ok(ResolvedNetwork::Sbm {
                n: *n,
                p: *p,
                q: *q,
                normalization: *normalization,
                a: *a,
            }),
            NetworkSource::File { edges, labels, normalization, a } => {
                let e = BufReader::new(fs::File::open(edges)?);
                let l = BufReader::new(fs::File::open(labels)?);
                let loaded = load_labeled_graph(e, l, *normalization, *a)?;
                Ok(ResolvedNetwork::Fixed {
                    graph: loaded.graph,
                    normalization: *normalization,
                    a: *a,
                })
            }
        }
    }

    fn trial_graph(&self) -> TrialGraph<'_> {
        match self {
            ResolvedNetwork::Sbm { n, p, q, normalization, a } => TrialGraph::Sbm {
                n: *n,
                p: *p,
                q: *q,
                normalization: *normalization,
                a: *a,
            },
            ResolvedNetwork::Fixed { graph, .. } => TrialGraph::Fixed(graph),
        }
    }

    /// Coupling of the reduced two-agent system: `a q/(p+q)` for
    /// row-normalized draws, `a n q` for unit weights; fixed graphs use the
    /// realized cross-link fraction (or mean cross degree).
    fn effective_coupling(&self) -> f64 {
        match self {
            ResolvedNetwork::Sbm { n, p, q, normalization, a } => match normalization {
                Normalization::RowNormalized => {
                    if p + q == 0.0 {
                        0.0
                    } else {
                        a * q / (p + q)
                    }
                }
                Normalization::UnitWeight => a * *n as f64 * q,
            },
            ResolvedNetwork::Fixed { graph, normalization, a } => {
                let mut cross = 0usize;
                let mut total = 0usize;
                for i in 0..graph.agent_count() {
                    let (s, c) = graph.same_cross_degrees(i);
                    cross += c;
                    total += s + c;
                }
                match normalization {
                    Normalization::RowNormalized => {
                        if total == 0 {
                            0.0
                        } else {
                            a * cross as f64 / total as f64
                        }
                    }
                    Normalization::UnitWeight => a * cross as f64 / graph.agent_count() as f64,
                }
            }
        }
    }
}

/// Limiting polarization of the reduced system at platform strength `b`.
fn theory_polarization(coupling: f64, b: f64) -> f64 {
    2.0 * b / (2.0 * coupling + b)
}

/// Runs `trials` per cell over the flat (cell, trial) grid; stream index =
/// flat position, so results do not depend on execution order. Failed trials
/// are logged and counted, not fatal.
fn run_cells(
    cfg: &ExperimentConfig,
    net: &ResolvedNetwork,
    cells: &[(f64, Option<f64>)],
) -> (Vec<TrialOutcome>, u64) {
    let trials = cfg.trials as usize;
    let total = cells.len() * trials;
    let results = parallel::map_indexed(total, |flat| {
        let cell = flat / trials;
        let (b, h) = cells[cell];
        let intervals = match h {
            Some(h) => BlockIntervals::spread(h),
            None => cfg.base_intervals(),
        };
        let ctx = TrialContext {
            graph: net.trial_graph(),
            b,
            h,
            intervals,
            integ: &cfg.integrator,
            seed: cfg.seed,
        };
        run_trial(&ctx, flat as u64, (flat % trials) as u64)
    });
    let mut outcomes = Vec::with_capacity(total);
    let mut failures = 0u64;
    for r in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                log::warn!("trial failed: {e}");
                failures += 1;
            }
        }
    }
    (outcomes, failures)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    v
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolarizationCell {
    pub b: f64,
    pub theory: f64,
    pub p05: Option<f64>,
    pub p50: Option<f64>,
    pub p95: Option<f64>,
    pub pd_trials: u64,
    pub consensus_trials: u64,
    pub nonconverged_trials: u64,
    pub total_trials: u64,
}

#[derive(Debug, Clone)]
pub struct PolarizationResult {
    pub cells: Vec<PolarizationCell>,
    pub outcomes: Vec<TrialOutcome>,
    pub failed_trials: u64,
}

/// CSV row shape: one row per (b, quantile).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolarizationRow {
    pub b: f64,
    pub quantile: f64,
    pub polarization: Option<f64>,
    pub theory: f64,
    pub pd_trials: u64,
    pub consensus_trials: u64,
    pub nonconverged_trials: u64,
    pub total_trials: u64,
}

impl PolarizationResult {
    pub fn csv_rows(&self) -> Vec<PolarizationRow> {
        let mut rows = Vec::new();
        for c in &self.cells {
            for (q, v) in [(0.05, c.p05), (0.5, c.p50), (0.95, c.p95)] {
                rows.push(PolarizationRow {
                    b: c.b,
                    quantile: q,
                    polarization: v,
                    theory: c.theory,
                    pd_trials: c.pd_trials,
                    consensus_trials: c.consensus_trials,
                    nonconverged_trials: c.nonconverged_trials,
                    total_trials: c.total_trials,
                });
            }
        }
        rows
    }
}

/// Final-polarization distribution conditional on persistent disagreement,
/// per platform strength, against the mean-field prediction.
pub fn run_polarization_experiment(cfg: &ExperimentConfig) -> Result<PolarizationResult> {
    cfg.validate()?;
    if cfg.b_grid.is_empty() {
        return Err(Error::invalid("polarization experiment needs a nonempty b grid"));
    }
    let net = ResolvedNetwork::resolve(&cfg.network)?;
    let coupling = net.effective_coupling();
    let cells: Vec<(f64, Option<f64>)> = cfg.b_grid.iter().map(|&b| (b, None)).collect();
    let (outcomes, failed) = run_cells(cfg, &net, &cells);
    let mut result_cells = Vec::new();
    for &b in &cfg.b_grid {
        let of_b: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.b == b).collect();
        let pd = sorted(
            of_b.iter()
                .filter(|o| o.kind == EquilibriumKind::PersistentDisagreement)
                .map(|o| o.polarization)
                .collect(),
        );
        let quant = |p: f64| (!pd.is_empty()).then(|| metrics::quantile(&pd, p));
        result_cells.push(PolarizationCell {
            b,
            theory: theory_polarization(coupling, b),
            p05: quant(0.05),
            p50: quant(0.5),
            p95: quant(0.95),
            pd_trials: pd.len() as u64,
            consensus_trials: of_b.iter().filter(|o| o.kind.is_consensus()).count() as u64,
            nonconverged_trials: of_b.iter().filter(|o| !o.converged).count() as u64,
            total_trials: of_b.len() as u64,
        });
    }
    Ok(PolarizationResult { cells: result_cells, outcomes, failed_trials: failed })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub h: f64,
    pub t: f64,
    pub mean_polarization: f64,
    pub sd_polarization: f64,
    pub trials: u64,
}

#[derive(Debug, Clone)]
pub struct MonotonicityResult {
    pub rows: Vec<SeriesPoint>,
    pub failed_trials: u64,
}

impl MonotonicityResult {
    pub fn series_for(&self, h: f64) -> Vec<&SeriesPoint> {
        self.rows.iter().filter(|r| r.h == h).collect()
    }
}

/// Mean +- sd polarization time series per initial half-width h.
pub fn run_trajectory_monotonicity(cfg: &ExperimentConfig) -> Result<MonotonicityResult> {
    cfg.validate()?;
    let hs = cfg
        .h_grid
        .clone()
        .ok_or_else(|| Error::invalid("monotonicity experiment needs an h grid"))?;
    let b = *cfg
        .b_grid
        .first()
        .ok_or_else(|| Error::invalid("monotonicity experiment needs one b value"))?;
    let net = ResolvedNetwork::resolve(&cfg.network)?;
    let trials = cfg.trials as usize;
    let integ = cfg.integrator;

    let mut rows = Vec::new();
    let mut failed = 0u64;
    for (ci, &h) in hs.iter().enumerate() {
        let series: Vec<Result<(Vec<f64>, Vec<f64>)>> = parallel::map_indexed(trials, |t| {
            let stream = (ci * trials + t) as u64;
            let mut rng = crate::rng::trial_rng(cfg.seed, stream);
            let drawn;
            let graph: &InfluenceGraph = match net.trial_graph() {
                TrialGraph::Sbm { n, p, q, normalization, a } => {
                    drawn = crate::network::generate_sbm_with_rng(n, p, q, normalization, a, &mut rng)?;
                    &drawn
                }
                TrialGraph::Fixed(g) => g,
            };
            let x0 = super::trial::draw_initial(
                graph.labels(),
                &BlockIntervals::spread(h),
                &mut rng,
            )?;
            let platform = PlatformParams::uniform(b, integ.epsilon, graph.agent_count())?;
            let mut times = Vec::new();
            let mut pols = Vec::new();
            sample_series(
                &OpinionState::at_origin(x0),
                graph,
                &platform,
                integ.step,
                integ.series_horizon,
                integ.sample_dt,
                |t, x| {
                    times.push(t);
                    pols.push(metrics::polarization(x, graph.labels()).unwrap_or(0.0));
                },
            )?;
            Ok((times, pols))
        });
        let mut ok: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for s in series {
            match s {
                Ok(v) => ok.push(v),
                Err(e) => {
                    log::warn!("series trial failed: {e}");
                    failed += 1;
                }
            }
        }
        if ok.is_empty() {
            continue;
        }
        let len = ok.iter().map(|(t, _)| t.len()).min().unwrap();
        for k in 0..len {
            let vals: Vec<f64> = ok.iter().map(|(_, p)| p[k]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / vals.len() as f64;
            rows.push(SeriesPoint {
                h,
                t: ok[0].0[k],
                mean_polarization: mean,
                sd_polarization: var.sqrt(),
                trials: vals.len() as u64,
            });
        }
    }
    Ok(MonotonicityResult { rows, failed_trials: failed })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsensusCell {
    pub h: f64,
    pub b: f64,
    pub consensus_probability: f64,
    /// Halfwidth of the 95% interval, 2 sqrt(p(1-p)/N).
    pub ci_halfwidth: f64,
    pub consensus_trials: u64,
    pub pd_trials: u64,
    pub nonconverged_trials: u64,
    pub total_trials: u64,
}

#[derive(Debug, Clone)]
pub struct ConsensusProbabilityResult {
    pub cells: Vec<ConsensusCell>,
    pub outcomes: Vec<TrialOutcome>,
    pub failed_trials: u64,
}

/// Consensus probability per initial half-width h at a fixed platform
/// strength, with the 95% interval `p +- 2 sqrt(p(1-p)/N)`.
pub fn run_consensus_probability(cfg: &ExperimentConfig) -> Result<ConsensusProbabilityResult> {
    cfg.validate()?;
    let hs = cfg
        .h_grid
        .clone()
        .ok_or_else(|| Error::invalid("consensus-probability experiment needs an h grid"))?;
    if cfg.b_grid.len() != 1 {
        return Err(Error::invalid(
            "consensus-probability experiment runs at exactly one b; set b = [value]",
        ));
    }
    let b = cfg.b_grid[0];
    let net = ResolvedNetwork::resolve(&cfg.network)?;
    let cells: Vec<(f64, Option<f64>)> = hs.iter().map(|&h| (b, Some(h))).collect();
    let (outcomes, failed) = run_cells(cfg, &net, &cells);
    let mut result_cells = Vec::new();
    for &h in &hs {
        let of_h: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.h == Some(h)).collect();
        let n = of_h.len() as f64;
        let consensus = of_h.iter().filter(|o| o.kind.is_consensus()).count() as u64;
        let p = if n > 0.0 { consensus as f64 / n } else { 0.0 };
        result_cells.push(ConsensusCell {
            h,
            b,
            consensus_probability: p,
            ci_halfwidth: if n > 0.0 { 2.0 * (p * (1.0 - p) / n).sqrt() } else { 0.0 },
            consensus_trials: consensus,
            pd_trials: of_h
                .iter()
                .filter(|o| o.kind == EquilibriumKind::PersistentDisagreement)
                .count() as u64,
            nonconverged_trials: of_h.iter().filter(|o| !o.converged).count() as u64,
            total_trials: of_h.len() as u64,
        });
    }
    Ok(ConsensusProbabilityResult { cells: result_cells, outcomes, failed_trials: failed })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremismCell {
    pub b: f64,
    pub q25: Option<f64>,
    pub q50: Option<f64>,
    pub q75: Option<f64>,
    pub consensus_probability: f64,
    pub pd_mean_extremism: Option<f64>,
    pub consensus_mean_extremism: Option<f64>,
    pub unconditional_mean_extremism: Option<f64>,
    pub pd_trials: u64,
    pub consensus_trials: u64,
    pub nonconverged_trials: u64,
    pub total_trials: u64,
}

#[derive(Debug, Clone)]
pub struct ExtremismResult {
    pub cells: Vec<ExtremismCell>,
    pub outcomes: Vec<TrialOutcome>,
    pub failed_trials: u64,
}

/// Default platform-strength grid of the extremism study.
pub const EXTREMISM_DEFAULT_B: [f64; 7] = [0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0];

/// Final-extremism quartiles per b plus the decomposition into consensus
/// probability, PD-conditional mean, and unconditional mean. Non-converged
/// trials are excluded from the conditional statistics and counted.
pub fn run_extremism_experiment(cfg: &ExperimentConfig) -> Result<ExtremismResult> {
    cfg.validate()?;
    let bs: Vec<f64> =
        if cfg.b_grid.is_empty() { EXTREMISM_DEFAULT_B.to_vec() } else { cfg.b_grid.clone() };
    let net = ResolvedNetwork::resolve(&cfg.network)?;
    let cells: Vec<(f64, Option<f64>)> = bs.iter().map(|&b| (b, None)).collect();
    let (outcomes, failed) = run_cells(cfg, &net, &cells);
    let mut result_cells = Vec::new();
    for &b in &bs {
        let of_b: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.b == b).collect();
        let converged: Vec<&&TrialOutcome> = of_b.iter().filter(|o| o.converged).collect();
        let ext = sorted(converged.iter().map(|o| o.extremism).collect());
        let pd: Vec<f64> = converged
            .iter()
            .filter(|o| o.kind == EquilibriumKind::PersistentDisagreement)
            .map(|o| o.extremism)
            .collect();
        let cons: Vec<f64> = converged
            .iter()
            .filter(|o| o.kind.is_consensus())
            .map(|o| o.extremism)
            .collect();
        let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        let quart = |p: f64| (!ext.is_empty()).then(|| metrics::quantile(&ext, p));
        result_cells.push(ExtremismCell {
            b,
            q25: quart(0.25),
            q50: quart(0.5),
            q75: quart(0.75),
            consensus_probability: if of_b.is_empty() {
                0.0
            } else {
                cons.len() as f64 / of_b.len() as f64
            },
            pd_mean_extremism: mean(&pd),
            consensus_mean_extremism: mean(&cons),
            unconditional_mean_extremism: mean(&ext),
            pd_trials: pd.len() as u64,
            consensus_trials: cons.len() as u64,
            nonconverged_trials: (of_b.len() - converged.len()) as u64,
            total_trials: of_b.len() as u64,
        });
    }
    Ok(ExtremismResult { cells: result_cells, outcomes, failed_trials: failed })
}

/// The fixed non-convergence counterexample: a 4-agent directed cycle with
/// a = 1, b = 0.6, eps = 0.1, x0 = (-1/2, 1, 1/2, -1).
#[derive(Debug, Clone)]
pub struct CycleDemo {
    pub report: EquilibriumReport,
    /// min over t in [150, 200] of the distance to the state at t = 100;
    /// small values indicate recurrence.
    pub recurrence_distance: f64,
    /// min/max of ||xdot||_inf over t in [150, 200]; bounded away from zero
    /// for a non-converging trajectory.
    pub tail_residual_min: f64,
    pub tail_residual_max: f64,
    /// Equilibrium report of the symmetrized variant (which converges).
    pub symmetrized: EquilibriumReport,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleDemoSummary {
    pub kind: EquilibriumKind,
    pub recurrence_distance: f64,
    pub tail_residual_min: f64,
    pub tail_residual_max: f64,
    pub symmetrized_kind: EquilibriumKind,
}

impl CycleDemo {
    pub fn summary(&self) -> CycleDemoSummary {
        CycleDemoSummary {
            kind: self.report.kind,
            recurrence_distance: self.recurrence_distance,
            tail_residual_min: self.tail_residual_min,
            tail_residual_max: self.tail_residual_max,
            symmetrized_kind: self.symmetrized.kind,
        }
    }
}

pub fn run_cycle_demo() -> Result<CycleDemo> {
    let mut dense = vec![vec![0.0; 4]; 4];
    dense[0][1] = 1.0;
    dense[1][2] = 1.0;
    dense[2][3] = 1.0;
    dense[3][0] = 1.0;
    let labels = vec![BlockLabel::Unlabeled; 4];
    let graph = InfluenceGraph::from_dense(&dense, labels)?;
    let platform = PlatformParams::uniform(0.6, 0.1, 4)?;
    let x0 = OpinionState::at_origin(vec![-0.5, 1.0, 0.5, -1.0]);
    let traj = integrate(&x0, &graph, &platform, 200.0, 0.01)?;
    let report = detect_equilibrium(&traj, &graph, &platform, 1e-6, 1.0)?;

    let reference = traj.states()[traj.index_at(100.0)].clone();
    let mut recurrence: f64 = f64::INFINITY;
    let mut res_min: f64 = f64::INFINITY;
    let mut res_max: f64 = 0.0;
    for k in traj.index_at(150.0)..traj.len() {
        let x = &traj.states()[k];
        let dist: f64 = x
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        recurrence = recurrence.min(dist);
        let f = vector_field(&traj.state(k), &graph, &platform)?;
        let res = f.iter().fold(0.0, |m: f64, &v| m.max(v.abs()));
        res_min = res_min.min(res);
        res_max = res_max.max(res);
    }

    let sym = graph.symmetrized();
    let settled = integrate_until_settled(
        &x0,
        &sym,
        &platform,
        0.01,
        &SettleOptions { horizon: 200.0, ..SettleOptions::default() },
    )?;

    Ok(CycleDemo {
        report,
        recurrence_distance: recurrence,
        tail_residual_min: res_min,
        tail_residual_max: res_max,
        symmetrized: settled.report,
        trajectory: traj,
    })
}

/// Two-agent helper used by the monotonicity study: theoretical series and
/// the predicted equilibrium polarization for the same parameters.
pub fn two_agent_polarization_series(
    a: f64,
    b: f64,
    y0: f64,
    horizon: f64,
    sample_dt: f64,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut t = 0.0;
    while t <= horizon + 1e-12 {
        out.push((t, two_agent::polarization_curve(a, b, y0, t)));
        t += sample_dt;
    }
    out
}
