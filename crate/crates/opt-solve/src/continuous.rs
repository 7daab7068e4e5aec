//! Continuous solves: pure LP, and convex QP handled as an LP plus an
//! alternating separation loop over cone cuts and quadratic epigraph
//! tangents.

use opt_ir::{ProblemIR, Solution, SolveStatus, VarKind};

use crate::cuts::separate_cone_cuts;
use crate::simplex::{LpStatus, Simplex};
use crate::std_form::{build_std_form, StdForm};
use crate::{SolveError, SolveOptions};

/// Solve a purely linear, continuous IR (no binaries, cones, quadratics,
/// or SOS2 sets).
pub fn solve_lp(ir: &ProblemIR, _opts: &SolveOptions) -> Result<Solution, SolveError> {
    if ir.vars.iter().any(|v| v.kind == VarKind::Binary) {
        return Err(SolveError::InvalidInput("solve_lp: binaries present".into()));
    }
    if !ir.cones.is_empty() {
        return Err(SolveError::InvalidInput("solve_lp: cones present".into()));
    }
    if !ir.obj_quad.is_empty() {
        return Err(SolveError::InvalidInput(
            "solve_lp: quadratic objective present".into(),
        ));
    }
    if !ir.sos2.is_empty() {
        return Err(SolveError::InvalidInput(
            "solve_lp: SOS2 sets present".into(),
        ));
    }
    let form = build_std_form(ir, false)?;
    let mut sim = Simplex::new(form.lp.clone());
    let status = sim.solve_from_scratch();
    Ok(finish(ir, &form, &sim, status, 0))
}

/// Solve a continuous convex subproblem: linear rows, rotated cones via
/// outer approximation, diagonal quadratic objective via epigraph tangents.
/// Binaries must already be fixed and SOS2 sets restricted to a window.
pub fn solve_qp(ir: &ProblemIR, opts: &SolveOptions) -> Result<Solution, SolveError> {
    if ir.vars.iter().any(|v| v.kind == VarKind::Binary && v.lower < v.upper) {
        return Err(SolveError::InvalidInput(
            "solve_qp: free binaries present (fix them first)".into(),
        ));
    }
    for set in &ir.sos2 {
        let free: Vec<usize> = set
            .members
            .iter()
            .enumerate()
            .filter(|(_, m)| {
                let v = &ir.vars[m.index()];
                v.lower < v.upper
            })
            .map(|(i, _)| i)
            .collect();
        let adjacent_pair = free.len() <= 2
            && free.windows(2).all(|w| w[1] - w[0] == 1);
        if !adjacent_pair {
            return Err(SolveError::InvalidInput(format!(
                "solve_qp: SOS2 set {:?} is not window-fixed",
                set.label
            )));
        }
    }
    let form = build_std_form(ir, true)?;
    let mut sim = Simplex::new(form.lp.clone());
    let mut status = sim.solve_from_scratch();
    let rounds = cut_loop(ir, &form, &mut sim, &mut status, opts);
    Ok(finish(ir, &form, &sim, status, rounds))
}

/// Alternate separation of violated cones and quadratic-gap tangents until
/// clean or the round budget runs out. Returns the number of rounds that
/// still saw violations when the budget was exhausted (0 = converged).
pub(crate) fn cut_loop(
    ir: &ProblemIR,
    form: &StdForm,
    sim: &mut Simplex,
    status: &mut LpStatus,
    opts: &SolveOptions,
) -> usize {
    // Tangents at +-horizon bound the epigraph along directions where the
    // variable itself is unbounded; the horizon doubles until the LP closes.
    let mut horizon = 1.0f64;
    let mut expansions = 0;
    let mut prev_x: Option<Vec<f64>> = None;
    for _round in 0..opts.max_cut_rounds + 64 {
        if *status == LpStatus::Unbounded && !form.quads.is_empty() && expansions < 62 {
            horizon *= 2.0;
            expansions += 1;
            let quads = form.quads.clone();
            for q in &quads {
                if !sim.bounds(q.var).0.is_finite() {
                    add_tangent_row(sim, q, -horizon);
                }
                if !sim.bounds(q.var).1.is_finite() {
                    add_tangent_row(sim, q, horizon);
                }
            }
            *status = sim.resolve_primal();
            continue;
        }
        if *status != LpStatus::Optimal {
            return 0;
        }
        let x = &sim.x()[..form.n_vars];
        let cone_cuts = separate_cone_cuts(x, &ir.cones, opts.cut_violation_tol);
        let mut added = cone_cuts.len();
        for cut in &cone_cuts {
            let (coeffs, slo, shi, rhs) = form.row_of(cut);
            sim.add_row(&coeffs, slo, shi, rhs);
        }
        // quadratic epigraph gap: eta lags x^2 where the tangent envelope is
        // coarse; refine at the current point. The gap tolerance also caps the
        // gradient error (grad err ~ 2*sqrt(coeff*gap)), so the returned point
        // meets the KKT tolerance, not just the objective one.
        let per_term_tol = opts.tol_opt / (form.quads.len().max(1) as f64);
        let quads = form.quads.clone();
        for q in &quads {
            let xv = sim.x()[q.var];
            let eta = sim.x()[q.eta];
            let gap = q.coeff * (xv * xv - eta);
            let kkt_gap = opts.tol_opt * opts.tol_opt / (4.0 * q.coeff);
            let tol = per_term_tol.min(kkt_gap).max(1e-12);
            if gap > tol {
                add_tangent_row(sim, q, xv);
                added += 1;
            }
        }
        if added == 0 {
            return 0;
        }
        // cuts below the simplex feasibility resolution cannot move the
        // point; accept the solve at that resolution instead of spinning
        let x_now = sim.x()[..form.n_vars].to_vec();
        if let Some(prev) = &prev_x {
            let moved = prev
                .iter()
                .zip(&x_now)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if moved < 1e-11 {
                return 0;
            }
        }
        prev_x = Some(x_now);
        *status = sim.resolve_dual();
    }
    1
}

fn add_tangent_row(sim: &mut Simplex, q: &crate::std_form::QuadCol, a: f64) {
    let mut coeffs = Vec::with_capacity(2);
    if a != 0.0 {
        coeffs.push((q.var as u32, 2.0 * a));
    }
    coeffs.push((q.eta as u32, -1.0));
    sim.add_row(&coeffs, 0.0, f64::INFINITY, a * a);
}

pub(crate) fn finish(
    ir: &ProblemIR,
    form: &StdForm,
    sim: &Simplex,
    status: LpStatus,
    unresolved_rounds: usize,
) -> Solution {
    let n = ir.num_vars();
    match status {
        LpStatus::Infeasible => Solution::infeasible(n),
        LpStatus::Unbounded => Solution::unbounded(n),
        LpStatus::Optimal | LpStatus::IterLimit => {
            let values: Vec<f64> = sim.x()[..n].to_vec();
            let objective = ir.objective_value(&values);
            let status = if status == LpStatus::Optimal && unresolved_rounds == 0 {
                SolveStatus::Optimal
            } else {
                SolveStatus::IterationLimit
            };
            // the simplex objective underestimates through the epigraph, so it
            // is the certified bound; the reported objective is exact at x
            let bound = sim.objective() + form.obj_offset;
            Solution {
                values,
                objective,
                status,
                bound,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use opt_ir::{LinConstraint, LinExpr, QuadObjTerm, RotatedConeConstraint, Sense, VarKind};

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn lp_max_under_cap() {
        let mut ir = ProblemIR::new();
        let x = ir.new_var("x", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        ir.push_row(LinConstraint::new(LinExpr::term(x, 1.0), Sense::Le, 3.0));
        ir.obj_lin = LinExpr::term(x, -1.0);
        let sol = solve_lp(&ir, &opts()).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn lp_infeasible_box() {
        let mut ir = ProblemIR::new();
        let x = ir.new_var("x", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        ir.push_row(LinConstraint::new(LinExpr::term(x, 1.0), Sense::Ge, 1.0));
        ir.push_row(LinConstraint::new(LinExpr::term(x, 1.0), Sense::Le, 0.0));
        ir.obj_lin = LinExpr::term(x, 1.0);
        let sol = solve_lp(&ir, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn qp_clamped_parabola() {
        // min (x-2)^2 on [0,1] -> x = 1, obj 1
        let mut ir = ProblemIR::new();
        let x = ir.new_var("x", 0.0, 1.0, VarKind::Continuous).unwrap();
        ir.obj_lin = LinExpr {
            terms: vec![(x, -4.0)],
            constant: 4.0,
        };
        ir.obj_quad.push(QuadObjTerm {
            var_a: x,
            var_b: x,
            coefficient: 1.0,
        });
        let sol = solve_qp(&ir, &opts()).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.values[0] - 1.0).abs() < 1e-5, "{}", sol.values[0]);
        assert!((sol.objective - 1.0).abs() < 1e-5, "{}", sol.objective);
    }

    #[test]
    fn qp_midpoint_average() {
        // min (z-a)^2 + (b-z)^2 -> z = (a+b)/2, with a=1, b=5 -> z=3
        let mut ir = ProblemIR::new();
        let z = ir
            .new_var("z", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous)
            .unwrap();
        // (z-1)^2 + (5-z)^2 = 2z^2 -12z + 26
        ir.obj_lin = LinExpr {
            terms: vec![(z, -12.0)],
            constant: 26.0,
        };
        ir.obj_quad.push(QuadObjTerm {
            var_a: z,
            var_b: z,
            coefficient: 2.0,
        });
        let sol = solve_qp(&ir, &opts()).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.values[0] - 3.0).abs() < 1e-4, "{}", sol.values[0]);
        assert!((sol.objective - 8.0).abs() < 1e-4);
    }

    #[test]
    fn qp_with_cone() {
        // min -p s.t. p^2 + q^2 <= v*l, v=1 fixed via bounds, l <= 4 -> p = 2
        let mut ir = ProblemIR::new();
        let p = ir.new_var("p", 0.0, 10.0, VarKind::Continuous).unwrap();
        let q = ir.new_var("q", 0.0, 10.0, VarKind::Continuous).unwrap();
        let v = ir.new_var("v", 1.0, 1.0, VarKind::Continuous).unwrap();
        let l = ir.new_var("l", 0.0, 4.0, VarKind::Continuous).unwrap();
        ir.cones.push(RotatedConeConstraint {
            x_terms: vec![p, q],
            u: LinExpr::term(v, 1.0),
            v: LinExpr::term(l, 1.0),
            name: "flow".into(),
        });
        ir.obj_lin = LinExpr::term(p, -1.0);
        let sol = solve_qp(&ir, &opts()).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.values[p.index()] - 2.0).abs() < 1e-4, "{:?}", sol.values);
        // reported point satisfies the cone within tolerance
        assert!(ir.check_solution(&sol).is_empty(), "{:?}", ir.check_solution(&sol));
    }
}
