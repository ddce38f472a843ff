//! Exact analysis of the two-agent system.
//!
//! Two mutually connected agents with coupling `a` and platform strength `b`
//! admit a complete classification of their limit behavior from the initial
//! opinions alone. Opposite-sign starts reach a persistent disagreement
//! equilibrium `(+-mu*, -+mu*)`, `mu* = b/(2a+b)`, exactly when at least one
//! of two inequalities on polarization and imbalance holds; otherwise they
//! cross into a consensus at one of the outlets.

mod band;
mod closed_form;
mod region;

pub use band::{band_crossing, BandCrossing};
pub use closed_form::{
    closed_form_trajectory, polarization_curve, trajectory_extrema, QuadrantTrajectory,
    TrajectoryExtrema,
};
pub use region::{region_grid, RegionGrid};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BlockLabel, InfluenceGraph, Normalization};
use crate::dynamics::PlatformParams;

/// The `(a, b, x0)` triple plus the interpolation width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAgentSystem {
    pub a: f64,
    pub b: f64,
    pub x0: (f64, f64),
    pub epsilon: f64,
}

impl TwoAgentSystem {
    pub fn new(a: f64, b: f64, x0: (f64, f64), epsilon: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("a must be positive, got {a}")));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::invalid(format!("b must be positive, got {b}")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !x0.0.is_finite() || !x0.1.is_finite() {
            return Err(Error::invalid("initial opinions must be finite"));
        }
        Ok(TwoAgentSystem { a, b, x0, epsilon })
    }

    /// The two-node influence graph with symmetric coupling `a`.
    pub fn graph(&self) -> InfluenceGraph {
        InfluenceGraph::from_undirected_edges(
            2,
            &[(0, 1)],
            vec![BlockLabel::L, BlockLabel::R],
            Normalization::UnitWeight,
            self.a,
        )
        .expect("two-node graph is always valid")
    }

    pub fn platform(&self) -> PlatformParams {
        PlatformParams::uniform(self.b, self.epsilon, 2).expect("validated at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassificationKind {
    #[serde(rename = "PD_C1")]
    PdC1,
    #[serde(rename = "PD_C2")]
    PdC2,
    #[serde(rename = "CO_SameSign")]
    CoSameSign,
    #[serde(rename = "CO_Band")]
    CoBand,
    #[serde(rename = "Boundary")]
    Boundary,
}

impl ClassificationKind {
    pub fn is_pd(self) -> bool {
        matches!(self, ClassificationKind::PdC1 | ClassificationKind::PdC2)
    }

    pub fn is_consensus(self) -> bool {
        matches!(self, ClassificationKind::CoSameSign | ClassificationKind::CoBand)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassificationKind::PdC1 => "PD_C1",
            ClassificationKind::PdC2 => "PD_C2",
            ClassificationKind::CoSameSign => "CO_SameSign",
            ClassificationKind::CoBand => "CO_Band",
            ClassificationKind::Boundary => "Boundary",
        }
    }
}

/// Evaluated sides of the classification inequalities. `lhs` is
/// `(2a+b)|x1-x2| - 2b`; C1 compares it against `b|x1+x2|` from above and C2
/// against the imbalance power term from below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionValues {
    pub lhs: f64,
    pub c1_rhs: f64,
    pub c2_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub kind: ClassificationKind,
    /// Known limit for PD and same-sign consensus. Band consensus leaves the
    /// sign to simulation, so no equilibrium is predicted analytically.
    pub predicted_equilibrium: Option<(f64, f64)>,
    /// True when the consensus sign must be resolved by simulation (CO_Band).
    pub sign_by_simulation: bool,
    pub conditions: Option<ConditionValues>,
}

/// Relative tolerance at which an inequality of the classification is
/// considered an equality and reported as Boundary.
const BOUNDARY_REL_TOL: f64 = 1e-12;

fn nearly_equal(x: f64, y: f64) -> bool {
    if !x.is_finite() || !y.is_finite() {
        return x == y;
    }
    (x - y).abs() <= BOUNDARY_REL_TOL * x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

/// Classification from raw parameters; epsilon plays no role in the
/// conditions themselves.
pub(crate) fn classify_params(a: f64, b: f64, x0: (f64, f64)) -> Result<ClassificationResult> {
    if !(a > 0.0) || !a.is_finite() || !(b > 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("a and b must be positive, got a={a}, b={b}")));
    }
    let (x1, x2) = x0;
    if x1 * x2 == 0.0 {
        return Err(Error::invalid("classification requires x1(0) * x2(0) != 0"));
    }
    if x1 * x2 > 0.0 {
        let s = x1.signum();
        return Ok(ClassificationResult {
            kind: ClassificationKind::CoSameSign,
            predicted_equilibrium: Some((s, s)),
            sign_by_simulation: false,
            conditions: None,
        });
    }

    let polarization = (x1 - x2).abs();
    let imbalance = (x1 + x2).abs();
    let lhs = (2.0 * a + b) * polarization - 2.0 * b;
    let c1_rhs = b * imbalance;
    // b^{1-2a/b} a^{2a/b} |x1+x2|^{1+2a/b}, evaluated in log space so extreme
    // b/a ratios neither overflow nor underflow; imbalance 0 gives exactly 0.
    let exponent = 2.0 * a / b;
    let c2_rhs = if imbalance == 0.0 {
        0.0
    } else {
        ((1.0 - exponent) * b.ln() + exponent * a.ln() + (1.0 + exponent) * imbalance.ln()).exp()
    };
    let conditions = Some(ConditionValues { lhs, c1_rhs, c2_rhs });

    if nearly_equal(lhs, c1_rhs) || nearly_equal(lhs, c2_rhs) {
        return Ok(ClassificationResult {
            kind: ClassificationKind::Boundary,
            predicted_equilibrium: None,
            sign_by_simulation: false,
            conditions,
        });
    }

    let mu = b / (2.0 * a + b);
    // PD trajectories stay in their opening quadrant, so the equilibrium sign
    // follows x0.
    let pd_equilibrium = if x1 < 0.0 { (-mu, mu) } else { (mu, -mu) };

    let kind = if lhs < c1_rhs {
        ClassificationKind::PdC1
    } else if lhs > c2_rhs {
        ClassificationKind::PdC2
    } else {
        ClassificationKind::CoBand
    };
    Ok(match kind {
        ClassificationKind::CoBand => ClassificationResult {
            kind,
            predicted_equilibrium: None,
            sign_by_simulation: true,
            conditions,
        },
        _ => ClassificationResult {
            kind,
            predicted_equilibrium: Some(pd_equilibrium),
            sign_by_simulation: false,
            conditions,
        },
    })
}

/// Classifies the system into persistent disagreement vs consensus from the
/// initial condition alone (valid for all sufficiently small epsilon).
pub fn classify(sys: &TwoAgentSystem) -> Result<ClassificationResult> {
    classify_params(sys.a, sys.b, sys.x0)
}

/// The persistent disagreement magnitude and polarization,
/// `(mu*, p*) = (b/(2a+b), 2b/(2a+b))`.
pub fn pd_equilibrium(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() || !(b > 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("a and b must be positive, got a={a}, b={b}")));
    }
    let mu = b / (2.0 * a + b);
    Ok((mu, 2.0 * mu))
}
