//! Membership test for the degree-concentration set and its tail bound.
//!
//! The set contains the adjacency matrices in which every agent's same-type
//! degree lies in `[(1-delta) p n, (1+delta) p n]` and cross-type degree in
//! `[(1-delta) q n, (1+delta) q n]`. Bands are centered on `p n` / `q n`
//! exactly as the theory writes them, even though realized within-block
//! degrees are Binomial(n-1, p); the O(1/n) offset is part of the contract.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BlockLabel, InfluenceGraph};

use super::SbmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationCheck {
    pub delta: f64,
    pub in_set: bool,
    /// max_i |same_deg_i - p n| / (p n)
    pub worst_same_deviation: f64,
    /// max_i |cross_deg_i - q n| / (q n)
    pub worst_cross_deviation: f64,
}

/// Exact membership test of the realized adjacency matrix.
pub fn concentration_check(
    graph: &InfluenceGraph,
    cfg: &SbmConfig,
    delta: f64,
) -> Result<ConcentrationCheck> {
    cfg.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if graph.agent_count() != 2 * cfg.n {
        return Err(Error::invalid(format!(
            "graph has {} agents but the config says {}",
            graph.agent_count(),
            2 * cfg.n
        )));
    }
    if graph.labels().iter().any(|&l| l == BlockLabel::Unlabeled) {
        return Err(Error::invalid("concentration check requires L/R labels on every node"));
    }
    let n = cfg.n as f64;
    let same_center = cfg.p * n;
    let cross_center = cfg.q * n;
    let deviation = |deg: usize, center: f64| -> f64 {
        if center == 0.0 {
            if deg == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (deg as f64 - center).abs() / center
        }
    };
    let mut worst_same: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    for i in 0..graph.agent_count() {
        let (same, cross) = graph.same_cross_degrees(i);
        worst_same = worst_same.max(deviation(same, same_center));
        worst_cross = worst_cross.max(deviation(cross, cross_center));
    }
    Ok(ConcentrationCheck {
        delta,
        in_set: worst_same <= delta && worst_cross <= delta,
        worst_same_deviation: worst_same,
        worst_cross_deviation: worst_cross,
    })
}

/// Per-agent binomial tail bound `3 exp(-delta^2 rate n / 8)` used in the
/// union-bound argument. Often vacuous at desk scale; it is the formula's
/// value regardless.
pub fn concentration_bound(n: usize, rate: f64, delta: f64) -> f64 {
    3.0 * (-delta * delta * rate * n as f64 / 8.0).exp()
}
