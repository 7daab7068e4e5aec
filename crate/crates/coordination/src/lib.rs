//! Decentralized coordination of the power-distribution and traffic
//! subproblems.
//!
//! The main algorithm alternates an adaptive-length inner loop of
//! fixed-discrete augmented-Lagrangian solves (the Lagrangian upper bound)
//! with free-discrete linear solves at shifted multipliers (the lower bound),
//! accepts dual updates only when the intermediate lower bound lands between
//! the current bounds (forward iterations), and stops when the bound gap
//! closes. Two baselines share the harness: consensus ADMM and the
//! fixed-inner-loop variant.
//!
//! Both operators run as peers; everything that crosses between them goes
//! through a [`transport::Endpoint`]. The consensus update is owned by the
//! traffic coordinator, and both sides derive identical forward/stop
//! decisions from the same exchanged scalars (JSON float round-trips are
//! exact), with the closure message double-checking agreement.

mod agents;
mod centralized;
mod runner;
mod state;

pub use agents::{z_update, PdnAgent, TnAgent};
pub use centralized::build_centralized;
pub use runner::{run_coordination, AlgoKind, CoordOutcome, RunStatus, TransportKind};
pub use state::{CoordinationState, RunTrace, StepType, TraceRow};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoordError {
    #[error("algorithm parameters invalid: {0}")]
    BadParams(String),
    #[error("boundary dimension mismatch: PDN {pdn}, TN {tn}")]
    BoundaryMismatch { pdn: usize, tn: usize },
    #[error("subproblem {side} {what} at outer {k}, inner {j}")]
    Subproblem {
        side: &'static str,
        what: String,
        k: usize,
        j: usize,
    },
    #[error("deterministic decision mismatch at outer {k}: local {local}, peer {peer}")]
    DecisionMismatch { k: usize, local: String, peer: String },
    #[error(transparent)]
    Transport(#[from] transport::TransportError),
    #[error(transparent)]
    Ir(#[from] opt_ir::IrError),
    #[error(transparent)]
    Solver(#[from] opt_solve::SolveError),
    #[error(transparent)]
    Pdn(#[from] model_pdn::PdnError),
    #[error(transparent)]
    Tn(#[from] model_tn::TnError),
    #[error("agent thread panicked")]
    AgentPanic,
}

/// Algorithm parameters; the shipped defaults are the two cases' settings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgoParams {
    /// Outer-loop convergence tolerance on the bound gap (absolute, $).
    pub eps: f64,
    /// Inner-loop tolerance on the Lagrangian value difference.
    pub eps_u: f64,
    /// Penalty parameter ($ per kW^2).
    pub gamma: f64,
    /// Outer-loop iteration limit.
    pub max_outer: usize,
    /// Fixed inner-loop pass count (the fixed-J baseline); `None` = adaptive.
    #[serde(default)]
    pub inner_loop_fixed: Option<usize>,
    /// ADMM penalty.
    pub admm_rho: f64,
    /// Inner-loop safety cap.
    pub inner_cap: usize,
    /// Initial lower bound, power side.
    pub phi0_p: f64,
    /// Initial lower bound, traffic side.
    pub phi0_v: f64,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            eps: 6e-3,
            eps_u: 1e-1,
            gamma: 4e-6,
            max_outer: 300,
            inner_loop_fixed: None,
            admm_rho: 1e-4,
            inner_cap: 100,
            phi0_p: -9999.0,
            phi0_v: -99999.0,
        }
    }
}

impl AlgoParams {
    pub fn validate(&self) -> Result<(), CoordError> {
        if !(self.eps > 0.0 && self.eps_u > 0.0 && self.gamma > 0.0) {
            return Err(CoordError::BadParams(
                "eps, eps_u and gamma must be positive".into(),
            ));
        }
        if self.max_outer < 1 {
            return Err(CoordError::BadParams("max_outer must be >= 1".into()));
        }
        if self.inner_cap < 1 {
            return Err(CoordError::BadParams("inner_cap must be >= 1".into()));
        }
        if let Some(j) = self.inner_loop_fixed {
            if j < 1 {
                return Err(CoordError::BadParams("fixed inner loops must be >= 1".into()));
            }
        }
        Ok(())
    }
}
