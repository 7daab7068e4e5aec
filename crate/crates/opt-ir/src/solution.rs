use serde::{Deserialize, Serialize};

/// Terminal state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    #[serde(rename = "optimal")]
    Optimal,
    #[serde(rename = "infeasible")]
    Infeasible,
    #[serde(rename = "unbounded")]
    Unbounded,
    /// Node or iteration limit hit; values hold the best incumbent and
    /// `bound` a valid dual bound.
    #[serde(rename = "iteration_limit")]
    IterationLimit,
}

/// Solver output: one value per [`crate::VarId`] plus the objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub status: SolveStatus,
    /// Valid lower bound on the optimum (equals `objective` when optimal).
    pub bound: f64,
}

impl Solution {
    pub fn infeasible(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            objective: f64::INFINITY,
            status: SolveStatus::Infeasible,
            bound: f64::INFINITY,
        }
    }

    pub fn unbounded(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            objective: f64::NEG_INFINITY,
            status: SolveStatus::Unbounded,
            bound: f64::NEG_INFINITY,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}
