//! Solver-agnostic intermediate representation of mixed-integer convex programs.
//!
//! Model builders emit a [`ProblemIR`] — variables with bounds, linear rows,
//! rotated-cone constraints, SOS2 sets, and a linear-plus-diagonal-quadratic
//! objective — and the solver consumes it. The IR is immutable once built;
//! every mutating operation returns a copy.
//!
//! An IR can carry named boundary-variable groups (e.g. `"p_D"`, `"p_T"`).
//! Coordination layers address boundary vectors through these groups only and
//! never inspect model internals.

mod expr;
mod problem;
mod solution;

pub use expr::{LinConstraint, LinExpr, Sense};
pub use problem::{
    Diagnostic, FixPlan, ProblemIR, QuadObjTerm, RotatedConeConstraint, Sos2Set, VarId, VarKind,
    VarSpec,
};
pub use solution::{SolveStatus, Solution};

use thiserror::Error;

/// Absolute feasibility tolerance for linear rows.
pub const TOL_FEAS: f64 = 1e-6;
/// Relative feasibility tolerance for rotated-cone constraints.
pub const TOL_CONE_REL: f64 = 1e-6;
/// Threshold below which an SOS2 weight counts as zero.
pub const SOS2_ZERO_TOL: f64 = 1e-6;

/// Errors raised by IR construction and transformation.
#[derive(Debug, Error)]
pub enum IrError {
    #[error("inverted bounds for variable {name:?}: lower {lower} > upper {upper}")]
    InvertedBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("binary variable {name:?} must have bounds within [0,1], got [{lower},{upper}]")]
    BinaryBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("non-finite bound or coefficient for {0}")]
    NonFinite(String),
    #[error("assignment covers non-binary variable {0:?}")]
    FixOnContinuous(String),
    #[error("assignment missing binary variable {0:?}")]
    FixMissingBinary(String),
    #[error("assignment value for {0:?} must be 0 or 1, got {1}")]
    FixNonBinaryValue(String, f64),
    #[error("unknown variable id {0}")]
    UnknownVar(u32),
    #[error("unknown SOS2 set label {0:?}")]
    UnknownSos2(String),
    #[error("SOS2 window start {start} out of range for set {label:?} of size {size}")]
    Sos2WindowOutOfRange {
        label: String,
        start: usize,
        size: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
