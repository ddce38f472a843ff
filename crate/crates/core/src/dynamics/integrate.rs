//! Fixed-step classical RK4 integration of the opinion dynamics.
//!
//! The right-hand side is globally Lipschitz; the only stiffness comes from
//! the sgn_eps band, whose slope is b/eps. The step is therefore refined to
//! `eps / (10 b_max)` when the requested step exceeds it, and additionally
//! capped by the social-drift scale so unit-weight graphs with large degrees
//! remain in the stability region.

use crate::error::{Error, Result};
use crate::graph::InfluenceGraph;

use super::equilibrium::{classify_converged_state, EquilibriumKind, EquilibriumReport};
use super::{check_dims, vector_field_into, OpinionState, PlatformParams};

/// A uniformly sampled trajectory: `states[k]` is the state at `times[k] = k * step_size`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    step: f64,
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, k: usize) -> OpinionState {
        OpinionState::new(self.states[k].clone(), self.times[k])
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory is nonempty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is nonempty")
    }

    /// Index of the first sample at time >= t.
    pub fn index_at(&self, t: f64) -> usize {
        ((t / self.step).ceil() as usize).min(self.len() - 1)
    }
}

/// The step actually used by the integrator: the requested step, refined so
/// that `step <= eps/(10 b_max)` and `step <= 1/(2 max_row_sum + b_max)`.
pub fn effective_step(step: f64, graph: &InfluenceGraph, platform: &PlatformParams) -> f64 {
    let mut eff = step;
    let b_max = platform.b_max();
    if b_max > 0.0 {
        eff = eff.min(platform.epsilon() / (10.0 * b_max));
    }
    let drift_scale = 2.0 * graph.max_row_sum() + b_max;
    if drift_scale > 0.0 {
        eff = eff.min(1.0 / drift_scale);
    }
    if eff < step {
        log::warn!("step {step} refined to {eff} (band width {}, b_max {b_max})", platform.epsilon());
    }
    eff
}

pub(crate) struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

pub(crate) struct StepStats {
    pub movement: f64,
    pub min: f64,
    pub max: f64,
    pub max_abs: f64,
    pub finite: bool,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Rk4 {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    pub fn step(
        &mut self,
        graph: &InfluenceGraph,
        platform: &PlatformParams,
        x: &mut [f64],
        h: f64,
    ) -> StepStats {
        let n = x.len();
        vector_field_into(x, graph, platform, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        vector_field_into(&self.tmp, graph, platform, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        vector_field_into(&self.tmp, graph, platform, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        vector_field_into(&self.tmp, graph, platform, &mut self.k4);

        let w = h / 6.0;
        let mut stats = StepStats {
            movement: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            max_abs: 0.0,
            finite: true,
        };
        for i in 0..n {
            let delta = w * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
            x[i] += delta;
            let v = x[i];
            stats.movement = stats.movement.max(delta.abs());
            stats.min = stats.min.min(v);
            stats.max = stats.max.max(v);
            stats.max_abs = stats.max_abs.max(v.abs());
            stats.finite &= v.is_finite();
        }
        stats
    }
}

fn validate_run(
    x0: &OpinionState,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
    horizon: f64,
    step: f64,
) -> Result<f64> {
    check_dims(x0.len(), graph, platform)?;
    if x0.is_empty() {
        return Err(Error::invalid("empty initial state"));
    }
    for (i, &v) in x0.opinions.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::invalid(format!("x0[{i}] = {v} is not finite")));
        }
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::invalid(format!("step must be positive, got {step}")));
    }
    if !(horizon >= step) || !horizon.is_finite() {
        return Err(Error::invalid(format!("horizon {horizon} must be >= step {step}")));
    }
    Ok(effective_step(step, graph, platform))
}

fn invariant_box_bound(x0: &[f64]) -> f64 {
    x0.iter().fold(1.0_f64, |k, &v| k.max(v.abs()))
}

const BOX_SLACK: f64 = 1e-9;

fn check_step_stats(stats: &StepStats, k_bound: f64, time: f64) -> Result<()> {
    if !stats.finite {
        return Err(Error::NumericalFailure { time, msg: "non-finite state".into() });
    }
    if stats.max_abs > k_bound + BOX_SLACK {
        return Err(Error::NumericalFailure {
            time,
            msg: format!(
                "state left the invariant box [-K, K] (|x| = {}, K = {k_bound})",
                stats.max_abs
            ),
        });
    }
    Ok(())
}

/// Integrates the dynamics and stores every sample. The final time is the
/// first grid point at or beyond `horizon`.
pub fn integrate(
    x0: &OpinionState,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
    horizon: f64,
    step: f64,
) -> Result<Trajectory> {
    let eff = validate_run(x0, graph, platform, horizon, step)?;
    let n_steps = ((horizon / eff) - 1e-9).ceil().max(1.0) as usize;
    let n = x0.len();
    if (n_steps + 1).saturating_mul(n) > 50_000_000 {
        return Err(Error::invalid(format!(
            "trajectory would store {} samples of dimension {n}; use integrate_until_settled \
             or sample_series for long horizons",
            n_steps + 1
        )));
    }
    let k_bound = invariant_box_bound(&x0.opinions);
    let mut rk4 = Rk4::new(n);
    let mut x = x0.opinions.clone();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(x.clone());
    for k in 1..=n_steps {
        let stats = rk4.step(graph, platform, &mut x, eff);
        let t = k as f64 * eff;
        check_step_stats(&stats, k_bound, t)?;
        times.push(t);
        states.push(x.clone());
    }
    Ok(Trajectory { step: eff, times, states })
}

/// Stopping rule for [`integrate_until_settled`].
#[derive(Debug, Clone)]
pub struct SettleOptions {
    /// Residual tolerance: converged requires `||xdot||_inf < tol` at the
    /// checkpoint and every per-step movement over the trailing window below
    /// `tol * window`.
    pub tol: f64,
    /// Length of the trailing movement window, in time units.
    pub window: f64,
    /// Give up (NonConvergent) once this much time has elapsed.
    pub horizon: f64,
    /// Stop as soon as every opinion exceeds +eps (or sits below -eps): the
    /// limit is then provably the all-(+1) (resp. -1) consensus. Only applies
    /// at alpha = 1.
    pub early_consensus_exit: bool,
}

impl Default for SettleOptions {
    fn default() -> Self {
        SettleOptions { tol: 1e-6, window: 1.0, horizon: 500.0, early_consensus_exit: true }
    }
}

/// Outcome of a streaming integration: the last state visited, its time, and
/// the equilibrium report.
#[derive(Debug, Clone)]
pub struct Settled {
    pub state: Vec<f64>,
    pub time: f64,
    pub report: EquilibriumReport,
}

/// Integrates without storing the trajectory, stopping at convergence or at
/// the horizon. Memory use is O(n + window/step).
pub fn integrate_until_settled(
    x0: &OpinionState,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
    step: f64,
    opts: &SettleOptions,
) -> Result<Settled> {
    if !(opts.tol > 0.0) || !(opts.window > 0.0) {
        return Err(Error::invalid("tol and window must be positive"));
    }
    let eff = validate_run(x0, graph, platform, opts.horizon, step)?;
    let n = x0.len();
    let k_bound = invariant_box_bound(&x0.opinions);
    let eps = platform.epsilon();
    let early = opts.early_consensus_exit && platform.alpha() == 1.0;

    let win_steps = ((opts.window / eff).round() as usize).max(1);
    let mut ring = vec![f64::INFINITY; win_steps];
    let n_steps = ((opts.horizon / eff) - 1e-9).ceil().max(1.0) as usize;

    let mut rk4 = Rk4::new(n);
    let mut x = x0.opinions.clone();
    let mut residual = vec![0.0; n];
    for k in 1..=n_steps {
        let stats = rk4.step(graph, platform, &mut x, eff);
        let t = k as f64 * eff;
        check_step_stats(&stats, k_bound, t)?;
        if early {
            if stats.min > eps {
                return Ok(consensus_exit(graph, n, t, EquilibriumKind::ConsensusPlus));
            }
            if stats.max < -eps {
                return Ok(consensus_exit(graph, n, t, EquilibriumKind::ConsensusMinus));
            }
        }
        ring[k % win_steps] = stats.movement;
        if k >= win_steps && k % win_steps == 0 {
            let worst_move = ring.iter().cloned().fold(0.0, f64::max);
            if worst_move < opts.tol * opts.window {
                vector_field_into(&x, graph, platform, &mut residual);
                let res = residual.iter().fold(0.0, |m: f64, &v| m.max(v.abs()));
                if res < opts.tol {
                    let kind = classify_converged_state(&x, platform, opts.tol);
                    let (ml, mr) = graph.block_means(&x);
                    let polarization = match (ml, mr) {
                        (Some(l), Some(r)) => Some(r - l),
                        _ => None,
                    };
                    let report = EquilibriumReport {
                        kind,
                        limit: Some(OpinionState::new(x.clone(), t)),
                        polarization,
                        settle_time: Some(t),
                    };
                    return Ok(Settled { state: x, time: t, report });
                }
            }
        }
    }
    let t = n_steps as f64 * eff;
    let report = EquilibriumReport {
        kind: EquilibriumKind::NonConvergent,
        limit: None,
        polarization: None,
        settle_time: None,
    };
    Ok(Settled { state: x, time: t, report })
}

fn consensus_exit(graph: &InfluenceGraph, n: usize, t: f64, kind: EquilibriumKind) -> Settled {
    let value = match kind {
        EquilibriumKind::ConsensusPlus => 1.0,
        _ => -1.0,
    };
    let limit = vec![value; n];
    let (ml, mr) = graph.block_means(&limit);
    let polarization = match (ml, mr) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    };
    Settled {
        state: limit.clone(),
        time: t,
        report: EquilibriumReport {
            kind,
            limit: Some(OpinionState::new(limit, t)),
            polarization,
            settle_time: Some(t),
        },
    }
}

/// Integrates to `horizon`, invoking `on_sample(t, state)` at t = 0 and then
/// every `sample_dt` (rounded to the step grid). Returns the final state.
pub fn sample_series<F>(
    x0: &OpinionState,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
    step: f64,
    horizon: f64,
    sample_dt: f64,
    mut on_sample: F,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]),
{
    if !(sample_dt > 0.0) {
        return Err(Error::invalid("sample_dt must be positive"));
    }
    let eff = validate_run(x0, graph, platform, horizon, step)?;
    let n_steps = ((horizon / eff) - 1e-9).ceil().max(1.0) as usize;
    let k_bound = invariant_box_bound(&x0.opinions);
    let mut rk4 = Rk4::new(x0.len());
    let mut x = x0.opinions.clone();
    // emission on the absolute time grid, so runs with different effective
    // steps still produce aligned series
    let mut next = sample_dt;
    on_sample(0.0, &x);
    for k in 1..=n_steps {
        let stats = rk4.step(graph, platform, &mut x, eff);
        let t = k as f64 * eff;
        check_step_stats(&stats, k_bound, t)?;
        if t + 1e-12 >= next || k == n_steps {
            on_sample(t, &x);
            while t + 1e-12 >= next {
                next += sample_dt;
            }
        }
    }
    Ok(x)
}
