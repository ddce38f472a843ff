//! Simulation engine and analysis toolkit for platform-influenced opinion
//! dynamics on networks.
//!
//! Agents hold scalar opinions that drift toward their neighbors (DeGroot
//! averaging through the graph Laplacian) while a platform pulls each agent
//! toward the media outlet matching their current lean, through the
//! saturating nonlinearity `sgn_eps`. The crate provides:
//!
//! - [`dynamics`]: the vector field, a fixed-step RK4 integrator with a
//!   band-aware step guard, equilibrium detection, and the Lyapunov
//!   certificate for symmetric influence graphs;
//! - [`two_agent`]: the exact two-agent analysis (persistent disagreement vs
//!   consensus classification, closed-form quadrant trajectories and their
//!   extrema, band-crossing eigenstructure, phase-region grids);
//! - [`network`]: two-block stochastic networks, degree-concentration
//!   checks, envelope ODE bounds, and labeled edge-list ingestion;
//! - [`experiments`]: the reproducible Monte Carlo studies (polarization
//!   distributions, trajectory monotonicity, consensus probability,
//!   extremism decomposition, and the directed-cycle counterexample).
//!
//! With the default `parallel` feature, trials and grids fan out over rayon;
//! disabling it yields a sequential build with identical outputs.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod network;
pub mod parallel;
pub mod rng;
pub mod two_agent;

pub use error::{Error, Result};
