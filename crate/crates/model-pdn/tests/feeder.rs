//! Feeder-builder checks: trivial balance cases, convex-hull validity by
//! sampling, loss coherence, dispatch extraction, and the recorded
//! independent-solver cross-checks for the built-in Case-1 feeder.

use model_pdn::{
    attach_augmented_objective_pdn, build_pdn_ir, case1_feeder, extract_dispatch, PdnCase,
    PdnLine, PdnNode,
};
use opt_solve::{solve_qp, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_node(p_load: f64, r: f64, x: f64, evcs: bool) -> PdnCase {
    PdnCase {
        name: "t".into(),
        nodes: vec![
            PdnNode {
                id: "root".into(),
                p_load: 0.0,
                q_load: 0.0,
                pv_p: 0.0,
                has_evcs: false,
                v_min: 0.9025,
                v_max: 1.1025,
            },
            PdnNode {
                id: "load".into(),
                p_load,
                q_load: p_load * 0.3,
                pv_p: 0.0,
                has_evcs: evcs,
                v_min: 0.9025,
                v_max: 1.1025,
            },
        ],
        lines: vec![PdnLine {
            from: "root".into(),
            to: "load".into(),
            r,
            x,
            ell_max: 30.0,
            s_max: 5.0,
        }],
        grid_node: "root".into(),
        grid_price: 80.0,
        evcs_pf_angle: 0.95f64.acos(),
        evcs_p_max_kw: 10_000.0,
        v_root: 1.0,
    }
}

#[test]
fn zero_load_zero_dispatch() {
    let case = two_node(0.0, 0.01, 0.02, false);
    let (ir, vars) = build_pdn_ir(&case).unwrap();
    assert!(ir.validate().is_empty());
    let sol = solve_qp(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    let d = extract_dispatch(&sol, &case, &vars);
    assert!(d.grid_p_mw.abs() < 1e-7);
    for (_, p, q, _) in &d.flows {
        assert!(p.abs() < 1e-7 && q.abs() < 1e-7);
    }
}

#[test]
fn lossless_line_balance() {
    let case = two_node(1.0, 0.0, 0.0, false);
    let (ir, vars) = build_pdn_ir(&case).unwrap();
    let sol = solve_qp(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    let d = extract_dispatch(&sol, &case, &vars);
    assert!((d.grid_p_mw - 1.0).abs() < 1e-6, "{}", d.grid_p_mw);
    assert!((sol.objective - 80.0).abs() < 1e-4);
}

#[test]
fn lossy_line_costs_more() {
    let case = two_node(1.0, 0.02, 0.04, false);
    let (ir, _) = build_pdn_ir(&case).unwrap();
    let sol = solve_qp(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    assert!(sol.objective > 80.0 + 1e-3, "losses must show: {}", sol.objective);
    assert!(ir.check_solution(&sol).is_empty());
}

#[test]
fn non_radial_rejected() {
    let mut case = two_node(1.0, 0.01, 0.02, false);
    case.lines.push(PdnLine {
        from: "root".into(),
        to: "load".into(),
        r: 0.01,
        x: 0.01,
        ell_max: 10.0,
        s_max: 5.0,
    });
    assert!(build_pdn_ir(&case).is_err());
}

#[test]
fn augmented_objective_identity_and_arithmetic() {
    let case = two_node(0.5, 0.01, 0.02, true);
    let (ir, _) = build_pdn_ir(&case).unwrap();
    // gamma = 0, lambda = 0 -> identical objective
    let same = attach_augmented_objective_pdn(&ir, &[0.0], &[0.0], 0.0).unwrap();
    assert_eq!(same.obj_lin, ir.obj_lin);
    assert!(same.obj_quad.is_empty());
    // single EVCS, z = 1, p_D forced to 0, gamma = 2 -> penalty adds 1
    let mut forced = attach_augmented_objective_pdn(&ir, &[0.0], &[1.0], 2.0).unwrap();
    let pd = forced.boundary_vars["p_D"][0];
    forced.vars[pd.index()].upper = 0.0;
    let base = solve_qp(&ir, &SolveOptions::default()).unwrap();
    let aug = solve_qp(&forced, &SolveOptions::default()).unwrap();
    assert!(
        ((aug.objective - base.objective) - 1.0).abs() < 1e-6,
        "penalty contribution {}",
        aug.objective - base.objective
    );
}

#[test]
fn hull_contains_exact_branch_flow_points() {
    // any point with p^2 + q^2 = v*l inside the box satisfies both hull rows
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (v_lo, v_hi) = (0.9025f64, 1.1025f64);
    let s_max = 4.0f64;
    let ell_max = 1.2 * s_max * s_max;
    let mut checked = 0;
    while checked < 1000 {
        let v: f64 = rng.gen_range(v_lo..v_hi);
        let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let s: f64 = rng.gen_range(0.0..s_max);
        let (p, q) = (s * th.cos(), s * th.sin());
        let ell = s * s / v;
        if ell > ell_max {
            continue;
        }
        checked += 1;
        // cone row
        assert!(p * p + q * q <= v * ell + 1e-9);
        // secant row
        let s2 = s_max * s_max;
        assert!(
            s2 * v + v_lo * v_hi * ell <= s2 * (v_lo + v_hi) + 1e-9,
            "secant violated at v={v}, ell={ell}"
        );
    }
}

#[test]
fn loss_coherence_row_by_row() {
    let case = case1_feeder(0);
    let (ir, vars) = build_pdn_ir(&case).unwrap();
    let sol = solve_qp(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    assert!(ir.check_solution(&sol).is_empty(), "{:?}", ir.check_solution(&sol));
    // delivered power below each line equals p - r*ell: replay the balance
    // of every node from its parent line and local injections
    let x = &sol.values;
    for (ni, n) in case.nodes.iter().enumerate() {
        let mut acc = -(n.p_load - n.pv_p);
        if n.id == case.grid_node {
            acc += x[vars.grid_p.index()];
        }
        if let Some(ev) = vars.evcs.iter().find(|e| e.node == ni) {
            acc -= x[ev.p_d_kw.index()] / 1000.0;
        }
        for (li, l) in case.lines.iter().enumerate() {
            if l.to == n.id {
                acc += x[vars.line_p[li].index()] - l.r * x[vars.line_ell[li].index()];
            }
            if l.from == n.id {
                acc -= x[vars.line_p[li].index()];
            }
        }
        assert!(acc.abs() < 1e-6, "node {} imbalance {acc}", n.id);
    }
}

#[test]
fn case1_feeder_voltages_within_bounds_at_zero_evcs() {
    let case = case1_feeder(0);
    let (mut ir, vars) = build_pdn_ir(&case).unwrap();
    let pd = ir.boundary_vars["p_D"][0];
    ir.vars[pd.index()].upper = 0.0;
    let sol = solve_qp(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    let d = extract_dispatch(&sol, &case, &vars);
    for (id, v) in &d.voltages {
        assert!(
            (0.90 - 1e-6..=1.05 + 1e-6).contains(v),
            "node {id} voltage {v}"
        );
    }
    assert!(d.grid_p_mw > 2.0, "feeder serves its load: {}", d.grid_p_mw);
}

#[test]
fn objective_monotone_in_load() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let base_load = rng.gen_range(0.3..1.5);
        let bump = rng.gen_range(0.05..0.5);
        let a = two_node(base_load, 0.015, 0.03, false);
        let b = two_node(base_load + bump, 0.015, 0.03, false);
        let sa = solve_qp(&build_pdn_ir(&a).unwrap().0, &SolveOptions::default()).unwrap();
        let sb = solve_qp(&build_pdn_ir(&b).unwrap().0, &SolveOptions::default()).unwrap();
        assert!(sb.objective >= sa.objective - 1e-9);
    }
}

/// Writes the oracle-input IRs under target/oracle/. Run explicitly with
/// `cargo test -p model-pdn -- --ignored dump`, then check the objectives
/// with tools/oracle_check.py; the recorded values live in the tests below.
#[test]
#[ignore]
fn dump_ir_for_oracle() {
    let case = case1_feeder(0);
    let (mut ir, _) = build_pdn_ir(&case).unwrap();
    let pd = ir.boundary_vars["p_D"][0];
    ir.vars[pd.index()].upper = 0.0;
    std::fs::create_dir_all("target/oracle").unwrap();
    std::fs::write("target/oracle/case1_feeder1_pd0.json", ir.to_json()).unwrap();

    let (ir2, _) = build_pdn_ir(&case).unwrap();
    let aug = attach_augmented_objective_pdn(&ir2, &[0.0], &[0.0], 4e-6).unwrap();
    std::fs::write("target/oracle/case1_feeder1_aug.json", aug.to_json()).unwrap();
}

#[test]
fn case1_feeder1_matches_recorded_conic_oracle() {
    // Recorded with tools/oracle_check.py (cvxpy/Clarabel) on the IRs dumped
    // by dump_ir_for_oracle.
    const ORACLE_PD0: f64 = 180.2970306847;
    const ORACLE_AUG: f64 = 180.2970306866; // lambda = 0, z = 0, gamma = 4e-6
    let case = case1_feeder(0);
    let (mut ir, _) = build_pdn_ir(&case).unwrap();
    let pd = ir.boundary_vars["p_D"][0];
    ir.vars[pd.index()].upper = 0.0;
    let sol = solve_qp(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    let rel = (sol.objective - ORACLE_PD0).abs() / ORACLE_PD0.abs().max(1.0);
    assert!(rel < 1e-4, "objective {} vs oracle {}", sol.objective, ORACLE_PD0);

    let (ir2, _) = build_pdn_ir(&case).unwrap();
    let aug = attach_augmented_objective_pdn(&ir2, &[0.0], &[0.0], 4e-6).unwrap();
    let sol2 = solve_qp(&aug, &SolveOptions::default()).unwrap();
    assert!(sol2.is_optimal());
    let rel2 = (sol2.objective - ORACLE_AUG).abs() / ORACLE_AUG.abs().max(1.0);
    assert!(rel2 < 1e-4, "objective {} vs oracle {}", sol2.objective, ORACLE_AUG);
}
