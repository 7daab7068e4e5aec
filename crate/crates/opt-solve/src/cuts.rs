//! Outer-approximation cuts for rotated-cone constraints.
//!
//! `sum(x_i^2) <= u v` is handled through its second-order-cone form
//! `||(2x, u - v)||_2 <= u + v`, whose left side minus right side is convex,
//! so every tangent hyperplane at a violating point is valid for the whole
//! cone-feasible set.

use opt_ir::{LinConstraint, LinExpr, RotatedConeConstraint, Sense, VarId};

/// Emit one supporting hyperplane per cone violated by more than `tol`
/// (relative violation, scaled by `max(1, ||x||^2)`).
pub fn separate_cone_cuts(
    values: &[f64],
    cones: &[RotatedConeConstraint],
    tol: f64,
) -> Vec<LinConstraint> {
    let mut out = Vec::new();
    for (ci, cone) in cones.iter().enumerate() {
        if cone.relative_violation(values) <= tol {
            continue;
        }
        out.push(tangent_cut(values, cone, ci));
    }
    out
}

fn tangent_cut(values: &[f64], cone: &RotatedConeConstraint, index: usize) -> LinConstraint {
    let ubar = cone.u.value(values);
    let vbar = cone.v.value(values);
    let xs: Vec<f64> = cone.x_terms.iter().map(|v| values[v.index()]).collect();
    let norm = (xs.iter().map(|x| 4.0 * x * x).sum::<f64>() + (ubar - vbar).powi(2)).sqrt();

    // g(x,u,v) = ||(2x, u-v)|| - (u+v); cut: g(p) + grad(p).(z - p) <= 0
    let mut expr = LinExpr::zero();
    let mut constant;
    if norm > 1e-12 {
        let g = norm - (ubar + vbar);
        constant = g;
        for (i, &xv) in xs.iter().enumerate() {
            let coef = 4.0 * xv / norm;
            push_scaled(&mut expr, cone.x_terms[i], coef);
            constant -= coef * xv;
        }
        let du = (ubar - vbar) / norm - 1.0;
        let dv = -(ubar - vbar) / norm - 1.0;
        push_expr(&mut expr, &cone.u, du);
        push_expr(&mut expr, &cone.v, dv);
        // gradient terms act on the variable parts of u and v only
        constant -= du * (ubar - cone.u.constant) + dv * (vbar - cone.v.constant);
    } else {
        // apex with u+v < 0: the cut is simply u + v >= 0
        push_expr(&mut expr, &cone.u, -1.0);
        push_expr(&mut expr, &cone.v, -1.0);
        constant = -cone.u.constant - cone.v.constant;
    }
    LinConstraint::named(
        LinExpr {
            terms: expr.terms,
            constant,
        },
        Sense::Le,
        0.0,
        format!("oa_cone{index}"),
    )
}

fn push_scaled(expr: &mut LinExpr, var: VarId, coef: f64) {
    if coef != 0.0 {
        expr.add_term(var, coef);
    }
}

fn push_expr(expr: &mut LinExpr, e: &LinExpr, scale: f64) {
    for &(v, c) in &e.terms {
        if scale * c != 0.0 {
            expr.add_term(v, scale * c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use opt_ir::{ProblemIR, VarKind};

    fn cone_pqvl() -> (ProblemIR, RotatedConeConstraint) {
        let mut ir = ProblemIR::new();
        let p = ir.new_var("p", -10.0, 10.0, VarKind::Continuous).unwrap();
        let q = ir.new_var("q", -10.0, 10.0, VarKind::Continuous).unwrap();
        let v = ir.new_var("v", 0.0, 10.0, VarKind::Continuous).unwrap();
        let l = ir.new_var("l", 0.0, 10.0, VarKind::Continuous).unwrap();
        let cone = RotatedConeConstraint {
            x_terms: vec![p, q],
            u: LinExpr::term(v, 1.0),
            v: LinExpr::term(l, 1.0),
            name: "c".into(),
        };
        (ir, cone)
    }

    #[test]
    fn point_inside_no_cut() {
        let (_, cone) = cone_pqvl();
        let x = vec![0.5, 0.0, 1.0, 1.0]; // 0.25 <= 1
        assert!(separate_cone_cuts(&x, &[cone], 1e-6).is_empty());
    }

    #[test]
    fn violating_point_cut_off_feasible_point_kept() {
        let (_, cone) = cone_pqvl();
        let bad = vec![1.0, 0.0, 1.0, 0.0]; // 1 > 0
        let cuts = separate_cone_cuts(&bad, std::slice::from_ref(&cone), 1e-6);
        assert_eq!(cuts.len(), 1);
        let cut = &cuts[0];
        // violating point is cut off
        assert!(cut.violation(&bad) > 1e-9);
        // (0,0,1,0) satisfies the exact cone, so the cut must keep it
        let good = vec![0.0, 0.0, 1.0, 0.0];
        assert!(cut.violation(&good) <= 1e-9);
    }

    #[test]
    fn sampled_cone_points_respect_cuts() {
        use rand::{Rng, SeedableRng};
        let (_, cone) = cone_pqvl();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        // cuts from several violating points
        let mut cuts = Vec::new();
        for _ in 0..50 {
            let pt = vec![
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(0.0..10.0),
                rng.gen_range(0.0..10.0),
            ];
            cuts.extend(separate_cone_cuts(&pt, std::slice::from_ref(&cone), 1e-6));
        }
        assert!(!cuts.is_empty());
        // 1000 exactly cone-feasible points satisfy every cut
        for _ in 0..1000 {
            let v: f64 = rng.gen_range(0.0..10.0);
            let l: f64 = rng.gen_range(0.0..10.0);
            let r = (v * l).sqrt() * rng.gen_range(0.0..1.0f64).sqrt();
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let pt = vec![r * th.cos(), r * th.sin(), v, l];
            for cut in &cuts {
                assert!(
                    cut.violation(&pt) <= 1e-7,
                    "cut {:?} violated by cone point {:?}",
                    cut.name,
                    pt
                );
            }
        }
    }

    #[test]
    fn constant_uv_cone() {
        // p^2 + q^2 <= S^2 as u = v = S
        let mut ir = ProblemIR::new();
        let p = ir.new_var("p", -10.0, 10.0, VarKind::Continuous).unwrap();
        let q = ir.new_var("q", -10.0, 10.0, VarKind::Continuous).unwrap();
        let cone = RotatedConeConstraint {
            x_terms: vec![p, q],
            u: LinExpr::constant(2.0),
            v: LinExpr::constant(2.0),
            name: "smax".into(),
        };
        let bad = vec![3.0, 0.0];
        let cuts = separate_cone_cuts(&bad, std::slice::from_ref(&cone), 1e-6);
        assert_eq!(cuts.len(), 1);
        assert!(cuts[0].violation(&bad) > 0.0);
        assert!(cuts[0].violation(&[1.9, 0.0]) <= 1e-9);
        assert!(cuts[0].violation(&[2.0, 0.0]) <= 1e-9);
    }
}
