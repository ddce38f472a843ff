//! Experiment configuration (TOML-friendly through serde).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Normalization;

fn d_epsilon() -> f64 {
    0.01
}
fn d_step() -> f64 {
    0.01
}
fn d_horizon() -> f64 {
    500.0
}
fn d_tol() -> f64 {
    1e-4
}
fn d_window() -> f64 {
    1.0
}
fn d_sample_dt() -> f64 {
    0.1
}
fn d_series_horizon() -> f64 {
    15.0
}
fn d_trials() -> u64 {
    1000
}
fn d_norm() -> Normalization {
    Normalization::RowNormalized
}
fn d_a() -> f64 {
    1.0
}

/// Integrator and stopping-rule settings shared by all experiment trials.
/// The step is auto-refined by the core guard when the band is narrow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
    #[serde(default = "d_step")]
    pub step: f64,
    #[serde(default = "d_horizon")]
    pub horizon: f64,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_window")]
    pub window: f64,
    /// Time-series sampling interval (trajectory experiments).
    #[serde(default = "d_sample_dt")]
    pub sample_dt: f64,
    /// Horizon of the sampled polarization series.
    #[serde(default = "d_series_horizon")]
    pub series_horizon: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            epsilon: d_epsilon(),
            step: d_step(),
            horizon: d_horizon(),
            tol: d_tol(),
            window: d_window(),
            sample_dt: d_sample_dt(),
            series_horizon: d_series_horizon(),
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("step", self.step),
            ("horizon", self.horizon),
            ("tol", self.tol),
            ("window", self.window),
            ("sample_dt", self.sample_dt),
            ("series_horizon", self.series_horizon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("integrator.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Where trial networks come from: a fresh SBM draw per trial, or a fixed
/// graph loaded from files (opinions are redrawn each trial either way).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NetworkSource {
    #[serde(rename = "sbm")]
    Sbm {
        n: usize,
        p: f64,
        q: f64,
        #[serde(default = "d_norm")]
        normalization: Normalization,
        #[serde(default = "d_a")]
        a: f64,
    },
    #[serde(rename = "file")]
    File {
        edges: PathBuf,
        labels: PathBuf,
        #[serde(default = "d_norm")]
        normalization: Normalization,
        #[serde(default = "d_a")]
        a: f64,
    },
}

/// Per-block uniform initial-opinion intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockIntervals {
    pub l: (f64, f64),
    pub r: (f64, f64),
}

impl BlockIntervals {
    /// The defaults of the block-model studies: L ~ Unif[-2, 0], R ~ Unif[0, 2].
    pub fn spread(h: f64) -> Self {
        BlockIntervals { l: (-h, 0.0), r: (0.0, h) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l.0 < self.l.1) || !(self.r.0 < self.r.1) {
            return Err(Error::invalid(format!(
                "initial intervals must be well-ordered, got L = {:?}, R = {:?}",
                self.l, self.r
            )));
        }
        Ok(())
    }
}

impl Default for BlockIntervals {
    fn default() -> Self {
        BlockIntervals::spread(2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    /// Platform-strength grid.
    #[serde(rename = "b", default)]
    pub b_grid: Vec<f64>,
    /// Initial-opinion half-width grid; each h uses L ~ Unif[-h, 0],
    /// R ~ Unif[0, h].
    #[serde(rename = "h", default)]
    pub h_grid: Option<Vec<f64>>,
    /// Explicit initial intervals (ignored when an h grid drives the draw).
    #[serde(default)]
    pub initial: Option<BlockIntervals>,
    #[serde(default = "d_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub integrator: IntegratorSettings,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        for &b in &self.b_grid {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::invalid(format!("b grid values must be positive, got {b}")));
            }
        }
        if let Some(hs) = &self.h_grid {
            for &h in hs {
                if !(h > 0.0) || !h.is_finite() {
                    return Err(Error::invalid(format!("h grid values must be positive, got {h}")));
                }
            }
        }
        if let Some(iv) = &self.initial {
            iv.validate()?;
        }
        if let NetworkSource::Sbm { n, p, q, a, .. } = &self.network {
            if *n == 0 {
                return Err(Error::invalid("network.n must be at least 1"));
            }
            for (name, v) in [("p", *p), ("q", *q)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid(format!("network.{name} must lie in [0, 1]")));
                }
            }
            if !(*a > 0.0) {
                return Err(Error::invalid("network.a must be positive"));
            }
        }
        self.integrator.validate()
    }

    /// Intervals used when no h grid applies.
    pub fn base_intervals(&self) -> BlockIntervals {
        self.initial.unwrap_or_default()
    }
}
