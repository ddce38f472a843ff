//! Lyapunov certificate for symmetric influence matrices:
//! `V(x) = 1/2 x^T (L+B) x - sum_j b_j int_0^{x_j} alpha*sgn_eps(t) dt`,
//! whose dissipation along the flow is `||(L+B)x - B alpha sgn_eps(x)||^2`.
//! Both are certificates only when the weights are symmetric; asymmetric
//! graphs are rejected.

use crate::error::{Error, Result};
use crate::graph::InfluenceGraph;

use super::{check_dims, vector_field, OpinionState, PlatformParams};

const SYMMETRY_REL_TOL: f64 = 1e-12;

fn require_symmetric(graph: &InfluenceGraph) -> Result<()> {
    if !graph.is_symmetric(SYMMETRY_REL_TOL) {
        return Err(Error::precondition(
            "Lyapunov certificate requires symmetric influence weights",
        ));
    }
    Ok(())
}

/// Closed form of `int_0^x sgn_eps(t) dt`: `x^2 / (2 eps)` inside the band,
/// `|x| - eps/2` outside.
fn sgn_integral(x: f64, epsilon: f64) -> f64 {
    if x.abs() <= epsilon {
        x * x / (2.0 * epsilon)
    } else {
        x.abs() - epsilon / 2.0
    }
}

pub fn lyapunov_value(
    state: &OpinionState,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
) -> Result<f64> {
    check_dims(state.len(), graph, platform)?;
    require_symmetric(graph)?;
    let x = &state.opinions;
    let eps = platform.epsilon();
    let alpha = platform.alpha();
    let mut quad = 0.0;
    let mut well = 0.0;
    for i in 0..x.len() {
        // (L x)_i = rowsum_i x_i - (A x)_i
        let (cols, ws) = graph.neighbors(i);
        let mut ax = 0.0;
        for (&j, &w) in cols.iter().zip(ws) {
            ax += w * x[j as usize];
        }
        let lx = graph.row_sum(i) * x[i] - ax;
        let b = platform.b()[i];
        quad += x[i] * (lx + b * x[i]);
        well += b * alpha * sgn_integral(x[i], eps);
    }
    Ok(0.5 * quad - well)
}

/// `||(L+B)x - B alpha sgn_eps(x)||^2 = ||xdot||^2`, the negated time
/// derivative of V along the flow. Zero exactly on the equilibrium set.
pub fn lyapunov_dissipation(
    state: &OpinionState,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
) -> Result<f64> {
    require_symmetric(graph)?;
    let f = vector_field(state, graph, platform)?;
    Ok(f.iter().map(|v| v * v).sum())
}
