//! Conversion of a [`ProblemIR`] into the simplex computational form.
//!
//! Structural columns come first in `VarId` order, then one epigraph column
//! per distinct diagonal quadratic variable (when quadratics are kept), then
//! one slack column per row. Row slacks encode the constraint sense through
//! their bounds.

use std::collections::BTreeMap;

use opt_ir::{LinConstraint, ProblemIR, Sense};

use crate::simplex::StdLp;
use crate::SolveError;

#[derive(Debug, Clone)]
pub(crate) struct QuadCol {
    /// Structural column of the squared variable.
    pub var: usize,
    /// Epigraph column with `eta >= var^2` enforced by tangent rows.
    pub eta: usize,
    pub coeff: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct StdForm {
    pub lp: StdLp,
    pub n_vars: usize,
    pub quads: Vec<QuadCol>,
    /// Constant part of the IR objective, absent from the simplex costs.
    pub obj_offset: f64,
}

impl StdForm {
    /// Translate an IR-space linear `<=` constraint into a std row triple.
    pub fn row_of(&self, cut: &LinConstraint) -> (Vec<(u32, f64)>, f64, f64, f64) {
        let coeffs: Vec<(u32, f64)> = cut.expr.terms.iter().map(|&(v, c)| (v.0, c)).collect();
        let rhs = cut.rhs - cut.expr.constant;
        match cut.sense {
            Sense::Le => (coeffs, 0.0, f64::INFINITY, rhs),
            Sense::Eq => (coeffs, 0.0, 0.0, rhs),
            Sense::Ge => (coeffs, f64::NEG_INFINITY, 0.0, rhs),
        }
    }
}

/// Build the computational form. `with_quads` keeps diagonal quadratic
/// objective terms as epigraph columns; callers that forbid quadratics pass
/// `false` and must have checked `obj_quad` is empty.
pub(crate) fn build_std_form(ir: &ProblemIR, with_quads: bool) -> Result<StdForm, SolveError> {
    let n = ir.num_vars();
    let mut lp = StdLp::default();
    lp.cols = vec![Vec::new(); n];
    lp.cost = vec![0.0; n];
    lp.lower = ir.vars.iter().map(|v| v.lower).collect();
    lp.upper = ir.vars.iter().map(|v| v.upper).collect();
    for &(v, c) in &ir.obj_lin.terms {
        lp.cost[v.index()] += c;
    }

    // epigraph columns for diagonal quadratics
    let mut quads = Vec::new();
    if with_quads {
        let mut by_var: BTreeMap<usize, f64> = BTreeMap::new();
        for q in &ir.obj_quad {
            if q.var_a != q.var_b {
                return Err(SolveError::InvalidInput(
                    "cross quadratic terms are not supported (squared residuals only)".into(),
                ));
            }
            if q.coefficient < 0.0 {
                return Err(SolveError::InvalidInput(
                    "negative diagonal quadratic coefficient (objective not PSD)".into(),
                ));
            }
            *by_var.entry(q.var_a.index()).or_insert(0.0) += q.coefficient;
        }
        for (var, coeff) in by_var {
            if coeff == 0.0 {
                continue;
            }
            let (l, u) = (lp.lower[var], lp.upper[var]);
            let eta_lo = if l <= 0.0 && u >= 0.0 {
                0.0
            } else {
                let a = l.abs().min(u.abs());
                a * a
            };
            let eta = lp.ncols();
            lp.cols.push(Vec::new());
            lp.cost.push(coeff);
            lp.lower.push(eta_lo);
            lp.upper.push(f64::INFINITY);
            quads.push(QuadCol { var, eta, coeff });
        }
    } else if !ir.obj_quad.is_empty() {
        return Err(SolveError::InvalidInput(
            "quadratic objective terms present but the requested solve is linear".into(),
        ));
    }

    let push_row = |lp: &mut StdLp, coeffs: &[(u32, f64)], slo: f64, shi: f64, rhs: f64| {
        let row = lp.nrows() as u32;
        for &(c, v) in coeffs {
            if v != 0.0 {
                lp.cols[c as usize].push((row, v));
            }
        }
        let slack = lp.ncols() as u32;
        lp.cols.push(vec![(row, 1.0)]);
        lp.cost.push(0.0);
        lp.lower.push(slo);
        lp.upper.push(shi);
        lp.rhs.push(rhs);
        lp.slack_of_row.push(slack);
    };

    for row in &ir.lin {
        let coeffs: Vec<(u32, f64)> = row.expr.terms.iter().map(|&(v, c)| (v.0, c)).collect();
        let rhs = row.rhs - row.expr.constant;
        match row.sense {
            Sense::Le => push_row(&mut lp, &coeffs, 0.0, f64::INFINITY, rhs),
            Sense::Eq => push_row(&mut lp, &coeffs, 0.0, 0.0, rhs),
            Sense::Ge => push_row(&mut lp, &coeffs, f64::NEG_INFINITY, 0.0, rhs),
        }
    }

    // initial quadratic tangents so the epigraph is supported from the start
    let mut form = StdForm {
        lp,
        n_vars: n,
        quads,
        obj_offset: ir.obj_lin.constant,
    };
    let quads = form.quads.clone();
    for q in &quads {
        let (l, u) = (form.lp.lower[q.var], form.lp.upper[q.var]);
        let mut pts = Vec::new();
        if l.is_finite() && u.is_finite() {
            pts.push(l);
            pts.push(u);
        } else if l.is_finite() {
            pts.push(l);
            pts.push(l + 1.0);
        } else if u.is_finite() {
            pts.push(u - 1.0);
            pts.push(u);
        } else {
            pts.push(-1.0);
            pts.push(1.0);
        }
        for a in pts {
            add_quad_tangent(&mut form.lp, q, a);
        }
    }
    Ok(form)
}

/// Tangent of `x^2` at `a`: `2 a x - eta <= a^2`, appended as a new row.
pub(crate) fn add_quad_tangent(lp: &mut StdLp, q: &QuadCol, a: f64) {
    let row = lp.nrows() as u32;
    if a != 0.0 {
        lp.cols[q.var].push((row, 2.0 * a));
    }
    lp.cols[q.eta].push((row, -1.0));
    let slack = lp.ncols() as u32;
    lp.cols.push(vec![(row, 1.0)]);
    lp.cost.push(0.0);
    lp.lower.push(0.0);
    lp.upper.push(f64::INFINITY);
    lp.rhs.push(a * a);
    lp.slack_of_row.push(slack);
}
