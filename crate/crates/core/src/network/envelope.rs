//! Envelope differential equations bounding all agents of a block.
//!
//! For graphs in the concentration set at level delta, four coupled scalar
//! ODEs sandwich every agent's opinion: with the block that starts positive
//! called "top", the top block's upper envelope couples to the bottom upper
//! envelope at rate `a (1-delta) q / ((1+delta)(p+q))` and its lower envelope
//! at rate `a (1+delta) q / ((1-delta)(p+q))` (reversed for the bottom
//! block), each with the usual platform term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeState {
    pub xbar_l: f64,
    pub xunder_l: f64,
    pub xbar_r: f64,
    pub xunder_r: f64,
}

#[derive(Debug, Clone)]
pub struct EnvelopeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<EnvelopeState>,
    pub step: f64,
}

impl EnvelopeTrajectory {
    /// Envelope of the block at `label` as (lower, upper) at sample k.
    pub fn bounds_l(&self, k: usize) -> (f64, f64) {
        (self.states[k].xunder_l, self.states[k].xbar_l)
    }

    pub fn bounds_r(&self, k: usize) -> (f64, f64) {
        (self.states[k].xunder_r, self.states[k].xbar_r)
    }
}

fn sgn_eps(x: f64, inv_eps: f64) -> f64 {
    (x * inv_eps).clamp(-1.0, 1.0)
}

/// RK4 integration of the four envelope equations with the same step policy
/// as the full dynamics. Requires opposite-sign block starts (`x_l > 0 > x_r`
/// or mirrored); delta = 0 collapses the pairs.
#[allow(clippy::too_many_arguments)]
pub fn integrate_envelopes(
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    delta: f64,
    x_l: f64,
    x_r: f64,
    epsilon: f64,
    horizon: f64,
    step: f64,
) -> Result<EnvelopeTrajectory> {
    if !(a > 0.0) || !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("a must be positive and b nonnegative"));
    }
    for (name, val) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&val) {
            return Err(Error::invalid(format!("{name} must lie in [0, 1], got {val}")));
        }
    }
    if p + q == 0.0 {
        return Err(Error::invalid("p + q must be positive (coefficient denominator)"));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "delta must lie in [0, 1) (1 - delta divides a coefficient), got {delta}"
        )));
    }
    if !(x_l * x_r < 0.0) {
        return Err(Error::invalid("block starts must have opposite signs"));
    }
    if !(epsilon > 0.0) || !(step > 0.0) || !(horizon >= step) {
        return Err(Error::invalid("epsilon and step must be positive, horizon >= step"));
    }

    let k_lo = a * (1.0 - delta) * q / ((1.0 + delta) * (p + q));
    let k_hi = a * (1.0 + delta) * q / ((1.0 - delta) * (p + q));
    let inv_eps = 1.0 / epsilon;

    // Orientation: the equations are written for x_l > 0 > x_r; the mirrored
    // case swaps the two blocks, integrates, and swaps back.
    let mirrored = x_r > x_l;
    let (top0, bot0) = if mirrored { (x_r, x_l) } else { (x_l, x_r) };

    // y = [top_bar, top_under, bot_bar, bot_under]; upper envelopes couple
    // to upper envelopes and lower to lower, with the top block's upper (and
    // bottom block's lower) at the weak rate k_lo and the other two at k_hi.
    let f = |y: &[f64; 4]| -> [f64; 4] {
        [
            k_lo * (y[2] - y[0]) + b * (sgn_eps(y[0], inv_eps) - y[0]),
            k_hi * (y[3] - y[1]) + b * (sgn_eps(y[1], inv_eps) - y[1]),
            k_hi * (y[0] - y[2]) + b * (sgn_eps(y[2], inv_eps) - y[2]),
            k_lo * (y[1] - y[3]) + b * (sgn_eps(y[3], inv_eps) - y[3]),
        ]
    };

    // reuse the global step guard by treating k_hi as the worst row sum
    let guard_graph_row_sum = k_hi;
    let mut eff = step;
    if b > 0.0 {
        eff = eff.min(epsilon / (10.0 * b));
    }
    let drift = 2.0 * guard_graph_row_sum + b;
    if drift > 0.0 {
        eff = eff.min(1.0 / drift);
    }

    let n_steps = ((horizon / eff) - 1e-9).ceil().max(1.0) as usize;
    let mut y = [top0, top0, bot0, bot0];
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let push = |times: &mut Vec<f64>, states: &mut Vec<EnvelopeState>, t: f64, y: &[f64; 4]| {
        let st = if mirrored {
            EnvelopeState { xbar_l: y[2], xunder_l: y[3], xbar_r: y[0], xunder_r: y[1] }
        } else {
            EnvelopeState { xbar_l: y[0], xunder_l: y[1], xbar_r: y[2], xunder_r: y[3] }
        };
        times.push(t);
        states.push(st);
    };
    push(&mut times, &mut states, 0.0, &y);
    for k in 1..=n_steps {
        let k1 = f(&y);
        let mut tmp = [0.0; 4];
        for i in 0..4 {
            tmp[i] = y[i] + 0.5 * eff * k1[i];
        }
        let k2 = f(&tmp);
        for i in 0..4 {
            tmp[i] = y[i] + 0.5 * eff * k2[i];
        }
        let k3 = f(&tmp);
        for i in 0..4 {
            tmp[i] = y[i] + eff * k3[i];
        }
        let k4 = f(&tmp);
        for i in 0..4 {
            y[i] += eff / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !y[i].is_finite() {
                return Err(Error::NumericalFailure {
                    time: k as f64 * eff,
                    msg: "envelope state not finite".into(),
                });
            }
        }
        push(&mut times, &mut states, k as f64 * eff, &y);
    }
    Ok(EnvelopeTrajectory { times, states, step: eff })
}
