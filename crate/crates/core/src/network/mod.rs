//! Two-block stochastic networks, degree-concentration checks, envelope
//! bounds, and labeled-graph ingestion.

mod concentration;
mod envelope;
mod io;
mod mean_field;

pub use concentration::{concentration_bound, concentration_check, ConcentrationCheck};
pub use envelope::{integrate_envelopes, EnvelopeState, EnvelopeTrajectory};
pub use io::{load_labeled_graph, write_edge_list, write_labels, LoadedGraph};
pub use mean_field::{mean_field_prediction, unit_weight_prediction, MeanFieldPrediction};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BlockLabel, InfluenceGraph, Normalization};
use crate::rng::trial_rng;

/// Two-block stochastic block model: `2n` agents, first block labeled L and
/// second labeled R, independent edges with probability `p` within a block
/// and `q` across.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    /// Agents per block.
    pub n: usize,
    /// Same-block edge probability.
    pub p: f64,
    /// Cross-block edge probability.
    pub q: f64,
    pub normalization: Normalization,
    /// Total influence budget per agent (row-normalized) or per-edge weight
    /// (unit-weight).
    pub a: f64,
    pub seed: u64,
}

impl SbmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        for (name, val) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&val) || !val.is_finite() {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {val}")));
            }
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::invalid(format!("a must be positive, got {}", self.a)));
        }
        Ok(())
    }
}

/// Draws a realization; deterministic for a fixed seed.
pub fn generate_sbm(cfg: &SbmConfig) -> Result<InfluenceGraph> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, 0);
    generate_sbm_with_rng(cfg.n, cfg.p, cfg.q, cfg.normalization, cfg.a, &mut rng)
}

/// Same draw, but from a caller-provided RNG (the experiment harness hands
/// each trial its own stream). Pairs are visited in row-major order (i < j).
pub fn generate_sbm_with_rng<R: Rng>(
    n: usize,
    p: f64,
    q: f64,
    normalization: Normalization,
    a: f64,
    rng: &mut R,
) -> Result<InfluenceGraph> {
    let total = 2 * n;
    let mut edges = Vec::new();
    for i in 0..total {
        for j in (i + 1)..total {
            let same_block = (i < n) == (j < n);
            let prob = if same_block { p } else { q };
            if rng.gen::<f64>() < prob {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let mut labels = vec![BlockLabel::L; n];
    labels.extend(std::iter::repeat(BlockLabel::R).take(n));
    InfluenceGraph::from_undirected_edges(total, &edges, labels, normalization, a)
}
