//! The opinion-dynamics vector field and its building blocks.
//!
//! Opinions follow `xdot = -L x + B (alpha * sgn_eps(x) - x)` where `L` is
//! the graph Laplacian, `B = diag(b)` the platform strengths, and `sgn_eps`
//! the continuous interpolation of the sign function that saturates at +-1
//! outside the band `|x| <= eps`.

mod equilibrium;
mod integrate;
mod lyapunov;

pub use equilibrium::{detect_equilibrium, EquilibriumKind, EquilibriumReport};
pub use integrate::{
    effective_step, integrate, integrate_until_settled, sample_series, SettleOptions, Settled,
    Trajectory,
};
pub use lyapunov::{lyapunov_dissipation, lyapunov_value};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InfluenceGraph;

/// Opinions of all agents at one time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpinionState {
    pub opinions: Vec<f64>,
    pub time: f64,
}

impl OpinionState {
    pub fn new(opinions: Vec<f64>, time: f64) -> Self {
        OpinionState { opinions, time }
    }

    pub fn at_origin(opinions: Vec<f64>) -> Self {
        OpinionState { opinions, time: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opinions.is_empty()
    }
}

/// Platform-side parameters: per-agent strength `b`, interpolation width
/// `epsilon`, and the average content slant scale `alpha` (1 = pure two-outlet
/// recommendation; smaller alpha models mixed content).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformParams {
    b: Vec<f64>,
    epsilon: f64,
    alpha: f64,
}

impl PlatformParams {
    pub fn uniform(b: f64, epsilon: f64, agents: usize) -> Result<Self> {
        Self::per_agent(vec![b; agents], epsilon)
    }

    pub fn per_agent(b: Vec<f64>, epsilon: f64) -> Result<Self> {
        for (i, &bi) in b.iter().enumerate() {
            if !bi.is_finite() || bi < 0.0 {
                return Err(Error::invalid(format!("b[{i}] = {bi} must be finite and >= 0")));
            }
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(PlatformParams { b, epsilon, alpha: 1.0 })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b_max(&self) -> f64 {
        self.b.iter().cloned().fold(0.0, f64::max)
    }

    pub fn agents(&self) -> usize {
        self.b.len()
    }
}

/// Continuous interpolation of the sign function: -1 below -eps, x/eps inside
/// the band, +1 above +eps. Odd and continuous in x.
pub fn sgn_eps(x: f64, epsilon: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("sgn_eps requires finite x, got {x}")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("sgn_eps requires epsilon > 0, got {epsilon}")));
    }
    Ok(sgn_eps_raw(x, 1.0 / epsilon))
}

#[inline(always)]
pub(crate) fn sgn_eps_raw(x: f64, inv_epsilon: f64) -> f64 {
    (x * inv_epsilon).clamp(-1.0, 1.0)
}

/// Right-hand side of the dynamics at `state`.
pub fn vector_field(
    state: &OpinionState,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
) -> Result<Vec<f64>> {
    check_dims(state.len(), graph, platform)?;
    let mut out = vec![0.0; state.len()];
    vector_field_into(&state.opinions, graph, platform, &mut out);
    Ok(out)
}

pub(crate) fn check_dims(
    n: usize,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
) -> Result<()> {
    if graph.agent_count() != n || platform.agents() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: state {n}, graph {}, platform {}",
            graph.agent_count(),
            platform.agents()
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn vector_field_into(
    x: &[f64],
    graph: &InfluenceGraph,
    platform: &PlatformParams,
    out: &mut [f64],
) {
    graph.social_drift_into(x, out);
    let inv_eps = 1.0 / platform.epsilon();
    let alpha = platform.alpha();
    for (i, o) in out.iter_mut().enumerate() {
        let b = platform.b()[i];
        *o += b * (alpha * sgn_eps_raw(x[i], inv_eps) - x[i]);
    }
}
