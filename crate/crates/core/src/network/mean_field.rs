//! Two-agent mean-field reduction of the two-block model.
//!
//! In the dense regime each agent's cross-block influence fraction tends to
//! `beta = q/(p+q)`, so the block model behaves like the two-agent system
//! `(a beta, b, (x_L, x_R))`. Under persistent disagreement the limiting
//! polarization is `2b/(2 a beta + b)` (row-normalized weights) or
//! `2b/(2 a n q + b)` (unit weights, where total cross influence scales with
//! the raw cross degree).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::two_agent::{classify_params, ClassificationResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldPrediction {
    /// Limiting cross-link fraction q/(p+q) (row-normalized mode).
    pub beta: f64,
    /// The coupling of the reduced two-agent system.
    pub effective_coupling: f64,
    pub classification: ClassificationResult,
    /// Present when the reduced system is classified PD.
    pub pd_polarization: Option<f64>,
}

fn predict(effective_coupling: f64, b: f64, x_l: f64, x_r: f64, beta: f64) -> Result<MeanFieldPrediction> {
    let classification = classify_params(effective_coupling, b, (x_l, x_r))?;
    let pd_polarization = classification
        .kind
        .is_pd()
        .then(|| 2.0 * b / (2.0 * effective_coupling + b));
    Ok(MeanFieldPrediction { beta, effective_coupling, classification, pd_polarization })
}

/// Row-normalized prediction: delegates to the two-agent classification at
/// coupling `a beta`. `q = 0` degenerates (no interaction) and is reported
/// as an error by the two-agent preconditions.
pub fn mean_field_prediction(
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    x_l: f64,
    x_r: f64,
) -> Result<MeanFieldPrediction> {
    if !(p >= 0.0 && q >= 0.0) || p + q <= 0.0 {
        return Err(Error::invalid(format!("p + q must be positive, got p={p}, q={q}")));
    }
    let beta = q / (p + q);
    predict(a * beta, b, x_l, x_r, beta)
}

/// Unit-weight (non-normalized) prediction: every edge carries weight `a`,
/// so the effective coupling is `a n q` and the PD polarization
/// `2b/(2 a n q + b)`.
pub fn unit_weight_prediction(
    a: f64,
    b: f64,
    n: usize,
    q: f64,
    x_l: f64,
    x_r: f64,
) -> Result<MeanFieldPrediction> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("q must lie in [0, 1], got {q}")));
    }
    predict(a * n as f64 * q, b, x_l, x_r, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_parameters_give_polarization_three_halves() {
        // a=1, b=2, p=1/4, q=1/8: beta = 1/3, 2b/(2 beta + b) = 1.5
        let p = mean_field_prediction(1.0, 2.0, 0.25, 0.125, -1.0, 1.0).unwrap();
        assert!((p.beta - 1.0 / 3.0).abs() < 1e-15);
        assert!(p.classification.kind.is_pd());
        assert!((p.pd_polarization.unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn no_cross_edges_is_degenerate() {
        let r = mean_field_prediction(1.0, 1.0, 0.25, 0.0, -1.0, 1.0);
        assert!(r.is_err());
    }

    #[test]
    fn unit_weight_polarization_formula() {
        // 2b/(b + 2 n q) at a = 1
        let (n, q, b) = (32usize, 0.125, 2.0);
        let p = unit_weight_prediction(1.0, b, n, q, -1.0, 1.0).unwrap();
        let expect = 2.0 * b / (b + 2.0 * n as f64 * q);
        assert!((p.pd_polarization.unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn consensus_prediction_has_no_polarization() {
        let p = mean_field_prediction(1.0, 0.5, 0.25, 0.125, 0.4, 1.0).unwrap();
        assert!(p.classification.kind.is_consensus());
        assert_eq!(p.pd_polarization, None);
    }
}
