//! Convergence detection on stored trajectories.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::InfluenceGraph;

use super::{check_dims, vector_field_into, OpinionState, PlatformParams, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    ConsensusPlus,
    ConsensusMinus,
    PersistentDisagreement,
    NonConvergent,
    Undetermined,
}

impl EquilibriumKind {
    pub fn is_consensus(self) -> bool {
        matches!(self, EquilibriumKind::ConsensusPlus | EquilibriumKind::ConsensusMinus)
    }

    pub fn is_converged(self) -> bool {
        matches!(
            self,
            EquilibriumKind::ConsensusPlus
                | EquilibriumKind::ConsensusMinus
                | EquilibriumKind::PersistentDisagreement
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub limit: Option<OpinionState>,
    /// mean_R - mean_L of the limit, when both blocks are present.
    pub polarization: Option<f64>,
    pub settle_time: Option<f64>,
}

impl EquilibriumReport {
    pub fn undetermined() -> Self {
        EquilibriumReport {
            kind: EquilibriumKind::Undetermined,
            limit: None,
            polarization: None,
            settle_time: None,
        }
    }
}

/// Consensus sits exactly at the outlet opinions (+-alpha), so a converged
/// state is consensus when every entry lies within 10*tol of the same outlet.
pub(crate) fn classify_converged_state(
    x: &[f64],
    platform: &PlatformParams,
    tol: f64,
) -> EquilibriumKind {
    let band = 10.0 * tol;
    let target = platform.alpha();
    if x.iter().all(|&v| (v - target).abs() <= band) {
        EquilibriumKind::ConsensusPlus
    } else if x.iter().all(|&v| (v + target).abs() <= band) {
        EquilibriumKind::ConsensusMinus
    } else {
        EquilibriumKind::PersistentDisagreement
    }
}

/// Applies the residual-plus-movement criterion to a stored trajectory:
/// converged iff `||xdot||_inf < tol` at the final state and every
/// state-to-state movement over the trailing `window` is below `tol * window`.
/// Trajectories shorter than the window are Undetermined.
pub fn detect_equilibrium(
    traj: &Trajectory,
    graph: &InfluenceGraph,
    platform: &PlatformParams,
    tol: f64,
    window: f64,
) -> Result<EquilibriumReport> {
    if traj.is_empty() {
        return Err(crate::error::Error::invalid("empty trajectory"));
    }
    check_dims(traj.final_state().len(), graph, platform)?;
    if !(tol > 0.0) || !(window > 0.0) {
        return Err(crate::error::Error::invalid("tol and window must be positive"));
    }
    let step = traj.step_size();
    let win_steps = ((window / step).round() as usize).max(1);
    if traj.len() <= win_steps {
        return Ok(EquilibriumReport::undetermined());
    }

    let converged_at = |k: usize, residual_buf: &mut Vec<f64>| -> bool {
        if k < win_steps {
            return false;
        }
        let max_move = (k - win_steps..k)
            .map(|j| max_abs_diff(&traj.states()[j + 1], &traj.states()[j]))
            .fold(0.0, f64::max);
        if max_move >= tol * window {
            return false;
        }
        vector_field_into(&traj.states()[k], graph, platform, residual_buf);
        residual_buf.iter().fold(0.0, |m: f64, &v| m.max(v.abs())) < tol
    };

    let mut buf = vec![0.0; traj.final_state().len()];
    let last = traj.len() - 1;
    if !converged_at(last, &mut buf) {
        return Ok(EquilibriumReport {
            kind: EquilibriumKind::NonConvergent,
            limit: None,
            polarization: None,
            settle_time: None,
        });
    }

    // Earliest checkpoint (window-stride resolution) where the criterion held.
    let mut settle_time = traj.times()[last];
    let mut k = win_steps;
    while k < last {
        if converged_at(k, &mut buf) {
            settle_time = traj.times()[k];
            break;
        }
        k += win_steps;
    }

    let x = traj.final_state();
    let kind = classify_converged_state(x, platform, tol);
    let (ml, mr) = graph.block_means(x);
    let polarization = match (ml, mr) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    };
    Ok(EquilibriumReport {
        kind,
        limit: Some(OpinionState::new(x.to_vec(), traj.final_time())),
        polarization,
        settle_time: Some(settle_time),
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (&x, &y)| m.max((x - y).abs()))
}
