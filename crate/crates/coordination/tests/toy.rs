//! End-to-end coordination on a desk toy: a 3-node feeder with two stations
//! against a 4-node road network with two paths. Checks convergence to the
//! centralized optimum, the bound sandwich, dual-update locality through the
//! audit, and baseline behavior.

use coordination::{
    build_centralized, run_coordination, z_update, AlgoKind, AlgoParams, RunStatus, StepType,
    TransportKind,
};
use model_pdn::{build_pdn_ir, PdnCase, PdnLine, PdnNode};
use model_tn::{build_tn_ir, enumerate_paths, OdPair, PwlConfig, TnArc, TnCase, TnNode};
use opt_ir::ProblemIR;
use opt_solve::{solve_micp_linear, SolveOptions};

fn toy_pdn() -> PdnCase {
    let node = |id: &str, evcs: bool| PdnNode {
        id: id.into(),
        p_load: if evcs { 0.0 } else { 0.4 },
        q_load: if evcs { 0.0 } else { 0.2 },
        pv_p: 0.0,
        has_evcs: evcs,
        v_min: 0.9025,
        v_max: 1.1025,
    };
    PdnCase {
        name: "toy".into(),
        nodes: vec![node("r", false), node("a", true), node("b", true)],
        lines: vec![
            PdnLine {
                from: "r".into(),
                to: "a".into(),
                r: 0.002,
                x: 0.004,
                ell_max: 20.0,
                s_max: 4.0,
            },
            PdnLine {
                from: "r".into(),
                to: "b".into(),
                r: 0.002,
                x: 0.004,
                ell_max: 20.0,
                s_max: 4.0,
            },
        ],
        grid_node: "r".into(),
        grid_price: 80.0,
        evcs_pf_angle: 0.95f64.acos(),
        evcs_p_max_kw: 4000.0,
        v_root: 1.0,
    }
}

fn toy_tn() -> TnCase {
    let station = |id: u32| TnNode {
        id,
        has_evcs: true,
        b_max: 50.0,
        pile_kw: 150.0,
        wait_base_min: 8.0,
        congestion_min_per_veh: 0.3,
        price_per_kwh: 0.08,
    };
    let junction = |id: u32| TnNode {
        id,
        has_evcs: false,
        b_max: 0.0,
        pile_kw: 1.0,
        wait_base_min: 0.0,
        congestion_min_per_veh: 0.0,
        price_per_kwh: 0.0,
    };
    let arc = |from: u32, to: u32, t0: f64, miles: f64| TnArc {
        from,
        to,
        t0_min: t0,
        capacity: 12.0,
        miles,
    };
    TnCase {
        name: "toy".into(),
        nodes: vec![junction(1), station(2), station(3), junction(4)],
        arcs: vec![
            arc(1, 2, 60.0, 80.0),
            arc(2, 4, 45.0, 60.0),
            arc(1, 3, 70.0, 100.0),
            arc(3, 4, 30.0, 40.0),
        ],
        od_pairs: vec![OdPair {
            origin: 1,
            dest: 4,
            demand: 10.0,
            e_max: 50.0,
            e_min: 5.0,
            e_0: 30.0,
            kwh_per_mile: 0.25,
            anxiety: 0.05,
        }],
        time_value: 0.4,
        evcs_p_max_kw: 2000.0,
    }
}

fn toy_params() -> AlgoParams {
    AlgoParams {
        eps: 0.05,
        eps_u: 0.5,
        gamma: 1e-4,
        max_outer: 120,
        inner_loop_fixed: None,
        admm_rho: 5e-4,
        inner_cap: 60,
        phi0_p: -1e4,
        phi0_v: -1e5,
    }
}

fn toy_irs() -> (ProblemIR, ProblemIR) {
    let (pdn_ir, _) = build_pdn_ir(&toy_pdn()).unwrap();
    let tn = toy_tn();
    let paths = enumerate_paths(&tn).unwrap();
    let pwl = PwlConfig {
        bpr_segments: 2,
        bpr_xmax_factor: 2.0,
        coupling_segments: 4,
    };
    let (tn_ir, _) = build_tn_ir(&tn, &paths, &pwl).unwrap();
    (pdn_ir, tn_ir)
}

#[test]
fn z_update_examples() {
    assert_eq!(z_update(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), vec![2.0, 3.0]);
    let v = vec![5.0, -1.0];
    assert_eq!(z_update(&v, &v).unwrap(), v);
    assert!(z_update(&[1.0], &[1.0, 2.0]).is_err());
    // minimizer check against perturbed candidates
    let (p_d, p_t) = (vec![1.0, -2.0, 0.5], vec![4.0, 0.0, 2.5]);
    let z = z_update(&p_d, &p_t).unwrap();
    let obj = |cand: &[f64]| -> f64 {
        cand.iter()
            .zip(&p_d)
            .map(|(c, a)| (c - a) * (c - a))
            .sum::<f64>()
            + cand
                .iter()
                .zip(&p_t)
                .map(|(c, b)| (b - c) * (b - c))
                .sum::<f64>()
    };
    let base = obj(&z);
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut rnd = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
        ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
    };
    for _ in 0..1000 {
        let cand: Vec<f64> = z.iter().map(|zi| zi + 0.5 * rnd()).collect();
        assert!(obj(&cand) >= base - 1e-12);
    }
}

#[test]
fn decoupled_toy_converges_immediately() {
    // boundary forced to zero on both sides: consensus is trivial and the
    // gap closes at the first outer iteration
    let (mut pdn_ir, mut tn_ir) = toy_irs();
    for &v in &pdn_ir.boundary_vars["p_D"].clone() {
        pdn_ir.vars[v.index()].upper = 0.0;
    }
    for &v in &tn_ir.boundary_vars["p_T"].clone() {
        let spec = &mut tn_ir.vars[v.index()];
        spec.upper = 0.0;
    }
    // charging must be off for p_T = 0 to be reachable: make batteries big
    // enough that no path needs charging
    let mut tn = toy_tn();
    for od in &mut tn.od_pairs {
        od.e_0 = 50.0;
        od.e_max = 50.0;
    }
    let paths = enumerate_paths(&tn).unwrap();
    let (tn_ir2, _) = build_tn_ir(
        &tn,
        &paths,
        &PwlConfig {
            bpr_segments: 2,
            bpr_xmax_factor: 2.0,
            coupling_segments: 4,
        },
    )
    .unwrap();
    let mut tn_ir2 = tn_ir2;
    for &v in &tn_ir2.boundary_vars["p_T"].clone() {
        tn_ir2.vars[v.index()].lower = 0.0;
        tn_ir2.vars[v.index()].upper = 0.0;
    }
    // forbid charging entirely so the stop binaries stay off
    for spec in tn_ir2.vars.iter_mut() {
        if spec.name.starts_with("E[") {
            spec.upper = 0.0;
        }
    }
    let out = run_coordination(
        AlgoKind::Vils,
        &pdn_ir,
        &tn_ir2,
        &toy_params(),
        &SolveOptions::default(),
        TransportKind::InProc,
    )
    .unwrap();
    assert_eq!(out.status, RunStatus::Converged);
    // the convergence check compares against the previous iteration's lower
    // bounds, so the trivial case needs one forward pass before it can stop
    assert!(out.outer_iterations <= 2, "{}", out.outer_iterations);
    assert!(out.residual_inf < 1e-9, "{}", out.residual_inf);
}

#[test]
fn vils_reaches_centralized_optimum_on_toy() {
    let (pdn_ir, tn_ir) = toy_irs();
    let central = build_centralized(&pdn_ir, &tn_ir).unwrap();
    let csol = solve_micp_linear(&central, &SolveOptions::default()).unwrap();
    assert!(csol.is_optimal());

    let out = run_coordination(
        AlgoKind::Vils,
        &pdn_ir,
        &tn_ir,
        &toy_params(),
        &SolveOptions::default(),
        TransportKind::InProc,
    )
    .unwrap();
    assert_eq!(out.status, RunStatus::Converged, "trace: {:?}", out.trace.rows.last());
    let rel = (out.objective() - csol.objective).abs() / csol.objective.abs().max(1.0);
    assert!(
        rel < 1e-3,
        "decentralized {} vs centralized {} (rel {rel:.2e})",
        out.objective(),
        csol.objective
    );

    // bound sandwich on every forward row; lower bounds never decrease
    let mut prev_low = f64::NEG_INFINITY;
    for row in &out.trace.rows {
        if row.step_type == StepType::Forward {
            assert!(
                row.phi_up >= row.phi_tilde - 1e-9 && row.phi_tilde >= prev_low - 1e-9,
                "sandwich broken at k={}",
                row.k
            );
        }
        assert!(row.phi_low >= prev_low - 1e-9, "lower bound decreased at k={}", row.k);
        prev_low = row.phi_low;
    }

    // privacy: payload vectors never exceed the boundary dimension
    let nb = out.p_d.len();
    assert!(out.pdn_audit.max_payload_len() <= nb);
    assert!(out.tn_audit.max_payload_len() <= nb);

    // the adaptive inner loop actually varies
    let counts: std::collections::BTreeSet<usize> =
        out.trace.rows.iter().map(|r| r.inner_count).collect();
    assert!(counts.len() >= 2, "inner counts {counts:?}");
}

#[test]
fn tcp_and_inproc_traces_match() {
    let (pdn_ir, tn_ir) = toy_irs();
    let a = run_coordination(
        AlgoKind::Vils,
        &pdn_ir,
        &tn_ir,
        &toy_params(),
        &SolveOptions::default(),
        TransportKind::InProc,
    )
    .unwrap();
    let b = run_coordination(
        AlgoKind::Vils,
        &pdn_ir,
        &tn_ir,
        &toy_params(),
        &SolveOptions::default(),
        TransportKind::Tcp,
    )
    .unwrap();
    assert_eq!(a.trace.to_csv_without_time(), b.trace.to_csv_without_time());
    // audit wire sequences (per direction) are byte-identical
    use transport::Direction;
    assert_eq!(
        a.pdn_audit.wires(Direction::Sent),
        b.pdn_audit.wires(Direction::Sent)
    );
    assert_eq!(
        a.tn_audit.wires(Direction::Sent),
        b.tn_audit.wires(Direction::Sent)
    );
}

#[test]
fn sdmgs_fixed_inner_loop_runs() {
    let (pdn_ir, tn_ir) = toy_irs();
    let mut params = toy_params();
    params.inner_loop_fixed = Some(3);
    let out = run_coordination(
        AlgoKind::Sdmgs,
        &pdn_ir,
        &tn_ir,
        &params,
        &SolveOptions::default(),
        TransportKind::InProc,
    )
    .unwrap();
    for row in &out.trace.rows {
        if row.step_type != StepType::Converged {
            assert_eq!(row.inner_count, 3);
        }
    }
}

#[test]
fn admm_converges_on_convex_toy() {
    // make the TN side convex: fix the discrete structure at the optimum of
    // the centralized problem, leaving a continuous QP per side
    let (pdn_ir, tn_ir) = toy_irs();
    let central = build_centralized(&pdn_ir, &tn_ir).unwrap();
    let csol = solve_micp_linear(&central, &SolveOptions::default()).unwrap();
    assert!(csol.is_optimal());
    // project the centralized TN block onto the TN IR's variables
    let offset = pdn_ir.num_vars();
    let tn_vals: Vec<f64> = csol.values[offset..].to_vec();
    let plan = tn_ir.fix_plan_from(&tn_vals);
    let tn_fixed = tn_ir.apply_fix_plan(&plan).unwrap();

    let mut params = toy_params();
    params.admm_rho = 2e-3;
    params.eps = 2.0; // residual scale is kW here
    params.max_outer = 400;
    let out = run_coordination(
        AlgoKind::Admm,
        &pdn_ir,
        &tn_fixed,
        &params,
        &SolveOptions::default(),
        TransportKind::InProc,
    )
    .unwrap();
    assert_eq!(out.status, RunStatus::Converged, "gap {}", out.gap);
    // with the discrete structure pinned at the centralized optimum, ADMM
    // lands on the centralized objective
    let rel = (out.objective() - csol.objective).abs() / csol.objective.abs().max(1.0);
    assert!(rel < 1e-3, "admm {} vs centralized {}", out.objective(), csol.objective);
    // residual trace emitted every iteration
    assert_eq!(out.trace.rows.len(), out.outer_iterations);
}
