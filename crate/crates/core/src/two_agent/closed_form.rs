//! Closed-form trajectory of the interior (-,+) quadrant.
//!
//! While `x1 < -eps` and `x2 > eps` the dynamics are linear and solve to
//!
//! ```text
//! x1(t) = -mu - e^{-bt} (u-v)/2 - e^{-(2a+b)t} D / (2(2a+b))
//! x2(t) =  mu - e^{-bt} (u-v)/2 + e^{-(2a+b)t} D / (2(2a+b))
//! ```
//!
//! with `x1(0) = -u`, `x2(0) = v`, `mu = b/(2a+b)` and
//! `D = (2a+b)(u+v) - 2b`. The derivatives have at most one interior sign
//! change, at `t* = log(|D| / (b|u-v|)) / (2a)` when the ratio is positive,
//! which yields the exact suprema/infima used by the classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one quadrant trajectory: `x1(0) = -u < 0`, `x2(0) = v > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrantTrajectory {
    pub a: f64,
    pub b: f64,
    pub u: f64,
    pub v: f64,
}

impl QuadrantTrajectory {
    pub fn new(a: f64, b: f64, u: f64, v: f64) -> Result<Self> {
        for (name, val) in [("a", a), ("b", b), ("u", u), ("v", v)] {
            if !(val > 0.0) || !val.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {val}")));
            }
        }
        Ok(QuadrantTrajectory { a, b, u, v })
    }

    fn mu(&self) -> f64 {
        self.b / (2.0 * self.a + self.b)
    }

    fn transient(&self) -> f64 {
        let s = 2.0 * self.a + self.b;
        (s * (self.u + self.v) - 2.0 * self.b) / (2.0 * s)
    }
}

/// Evaluates the closed form at time `t >= 0`. Describes the true sgn_eps
/// dynamics only while `x1 < -eps` and `x2 > eps`.
pub fn closed_form_trajectory(q: &QuadrantTrajectory, t: f64) -> (f64, f64) {
    let slow = (-q.b * t).exp() * (q.u - q.v) / 2.0;
    let fast = (-(2.0 * q.a + q.b) * t).exp() * q.transient();
    (-q.mu() - slow - fast, q.mu() - slow + fast)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryExtrema {
    /// sup over t >= 0 of x1(t) (endpoints included).
    pub max_x1: f64,
    /// inf over t >= 0 of x2(t).
    pub min_x2: f64,
    /// Interior critical time of x1, when it exists and is positive.
    pub t_star_x1: Option<f64>,
    pub t_star_x2: Option<f64>,
}

/// Exact extrema of the quadrant trajectory. The degenerate cases `u = v`
/// and `D = 0` have monotone coordinates and fall out of the endpoint
/// candidates automatically.
pub fn trajectory_extrema(a: f64, b: f64, u: f64, v: f64) -> Result<TrajectoryExtrema> {
    let q = QuadrantTrajectory::new(a, b, u, v)?;
    let s = 2.0 * a + b;
    let d = s * (u + v) - 2.0 * b;
    let w = u - v;
    let mu = q.mu();

    // xdot1 = 0 at e^{2at} = -D/(bw); xdot2 = 0 at e^{2at} = D/(bw).
    let critical = |ratio: f64| -> Option<f64> {
        if !ratio.is_finite() || ratio <= 0.0 {
            return None;
        }
        let t = ratio.ln() / (2.0 * a);
        (t > 0.0).then_some(t)
    };
    let t1 = if w == 0.0 || d == 0.0 { None } else { critical(-d / (b * w)) };
    let t2 = if w == 0.0 || d == 0.0 { None } else { critical(d / (b * w)) };

    let mut max_x1 = (-u).max(-mu);
    if let Some(t) = t1 {
        max_x1 = max_x1.max(closed_form_trajectory(&q, t).0);
    }
    let mut min_x2 = v.min(mu);
    if let Some(t) = t2 {
        min_x2 = min_x2.min(closed_form_trajectory(&q, t).1);
    }
    Ok(TrajectoryExtrema { max_x1, min_x2, t_star_x1: t1, t_star_x2: t2 })
}

/// Polarization of a PD trajectory:
/// `y(t) = 2b/(2a+b) + e^{-(2a+b)t} (y0 - 2b/(2a+b))`. Monotone increasing
/// when `y0` starts below the equilibrium polarization, decreasing above.
/// Valid only under a PD classification (caller's responsibility).
pub fn polarization_curve(a: f64, b: f64, y0: f64, t: f64) -> f64 {
    let p_star = 2.0 * b / (2.0 * a + b);
    p_star + (-(2.0 * a + b) * t).exp() * (y0 - p_star)
}
