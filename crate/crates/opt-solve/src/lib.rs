//! Self-contained solver for [`opt_ir::ProblemIR`]: a bounded-variable
//! simplex LP core, convex QP for penalty-augmented continuous subproblems
//! via epigraph tangent cuts, branch-and-bound with binary and SOS2 branching
//! for linear-objective mixed-integer problems, and outer-approximation cuts
//! for rotated-cone constraints.
//!
//! One numerical kernel serves all four problem classes; cones and diagonal
//! quadratics are both handled by iteratively separating supporting
//! hyperplanes on top of the LP. Every solve is deterministic: identical
//! inputs and options produce bit-identical [`Solution`]s.

mod bb;
mod continuous;
mod cuts;
mod simplex;
mod std_form;

pub use bb::solve_micp_linear;
pub use continuous::{solve_lp, solve_qp};
pub use cuts::separate_cone_cuts;

use opt_ir::FixPlan;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Solver knobs. Tolerances are absolute unless stated otherwise.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Feasibility tolerance for linear rows.
    pub tol_feas: f64,
    /// Objective / KKT tolerance: cut loops refine until the epigraph gap is
    /// below this.
    pub tol_opt: f64,
    /// Integrality tolerance for binaries.
    pub tol_int: f64,
    /// Branch-and-bound node budget.
    pub max_bb_nodes: usize,
    /// Rounds of cone / quadratic cut separation per continuous solve.
    pub max_cut_rounds: usize,
    /// Relative cone violation above which a cut is emitted.
    pub cut_violation_tol: f64,
    /// Optional warm hint: fixing plan evaluated up front to seed the
    /// branch-and-bound incumbent.
    pub hint: Option<FixPlan>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-6,
            tol_opt: 1e-6,
            tol_int: 1e-6,
            max_bb_nodes: 50_000,
            max_cut_rounds: 30,
            cut_violation_tol: 1e-6,
            hint: None,
        }
    }
}
