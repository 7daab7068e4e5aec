//! TN builder checks: forced flows, forced charging, UE complementarity on a
//! hand-solvable two-path toy, PWL accuracy of the BPR and coupling grids,
//! and a reduced-size enumeration cross-check of the full pipeline.

use std::collections::BTreeMap;

use model_tn::{
    attach_augmented_objective_tn, bpr_breakpoints, bpr_time, build_tn_ir,
    coupling_pwl_tolerance, enumerate_paths, extract_routing, OdPair, PwlConfig, TnArc, TnCase,
    TnNode,
};
use opt_ir::{SolveStatus, VarKind};
use opt_solve::{solve_micp_linear, solve_qp, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn station(id: u32, price: f64) -> TnNode {
    TnNode {
        id,
        has_evcs: true,
        b_max: 55.0,
        pile_kw: 150.0,
        wait_base_min: 10.0,
        congestion_min_per_veh: 0.2,
        price_per_kwh: price,
    }
}

fn junction(id: u32) -> TnNode {
    TnNode {
        id,
        has_evcs: false,
        b_max: 0.0,
        pile_kw: 1.0,
        wait_base_min: 0.0,
        congestion_min_per_veh: 0.0,
        price_per_kwh: 0.0,
    }
}

fn arc(from: u32, to: u32, t0: f64, cap: f64, miles: f64) -> TnArc {
    TnArc {
        from,
        to,
        t0_min: t0,
        capacity: cap,
        miles,
    }
}

fn od(origin: u32, dest: u32, demand: f64) -> OdPair {
    OdPair {
        origin,
        dest,
        demand,
        e_max: 55.0,
        e_min: 5.5,
        e_0: 50.0,
        kwh_per_mile: 0.2,
        anxiety: 0.05,
    }
}

fn small_pwl() -> PwlConfig {
    PwlConfig {
        bpr_segments: 2,
        bpr_xmax_factor: 2.0,
        coupling_segments: 2,
    }
}

#[test]
fn single_path_flow_forced() {
    // one path, one od: conservation forces f = F and nu = 1
    let case = TnCase {
        name: "line".into(),
        nodes: vec![junction(1), station(2, 0.08), junction(3)],
        arcs: vec![arc(1, 2, 10.0, 50.0, 20.0), arc(2, 3, 10.0, 50.0, 20.0)],
        od_pairs: vec![od(1, 3, 12.0)],
        time_value: 0.5,
        evcs_p_max_kw: 1e5,
    };
    let paths = enumerate_paths(&case).unwrap();
    let (ir, vars) = build_tn_ir(&case, &paths, &small_pwl()).unwrap();
    assert!(ir.validate().is_empty());
    let sol = solve_micp_linear(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    let r = extract_routing(&sol, &case, &paths, &vars);
    assert!((r.per_od[0].paths[0].flow - 12.0).abs() < 1e-6);
    assert!(r.per_od[0].paths[0].used);
}

#[test]
fn charging_forced_by_energy_deficit() {
    // initial charge cannot cover the trip: the single stop must charge to
    // full, and the charge equals e_max - (e_0 - consumed)
    let case = TnCase {
        name: "needy".into(),
        nodes: vec![junction(1), station(2, 0.08), junction(3)],
        arcs: vec![arc(1, 2, 10.0, 50.0, 150.0), arc(2, 3, 10.0, 50.0, 150.0)],
        od_pairs: vec![od(1, 3, 5.0)],
        time_value: 0.5,
        evcs_p_max_kw: 1e5,
    };
    let paths = enumerate_paths(&case).unwrap();
    let (ir, vars) = build_tn_ir(&case, &paths, &small_pwl()).unwrap();
    let sol = solve_micp_linear(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    let r = extract_routing(&sol, &case, &paths, &vars);
    let stop = &r.per_od[0].paths[0].stops[0];
    assert!(stop.charging);
    // arrive at 2 with 50 - 30 = 20; charge to full including PWL station
    assert!((stop.kwh - 35.0).abs() < 1e-5, "charge {}", stop.kwh);
    // station power = flow * charge = 5 * 35 (breakpoint-exact grids not
    // guaranteed, so allow the declared PWL tolerance)
    let tol = coupling_pwl_tolerance(5.0, 55.0, 2);
    assert!(
        (r.station_kw[0].1 - 175.0).abs() <= tol + 1e-6,
        "station {} vs 175 (tol {tol})",
        r.station_kw[0].1
    );
}

#[test]
fn ue_two_paths_cheap_wins() {
    // constant-time paths (huge capacity): costs ~10 vs ~12 time units; all
    // flow lands on the cheap path and the od cost equals its cost
    let case = TnCase {
        name: "ue".into(),
        nodes: vec![junction(1), station(2, 0.0), station(3, 0.0), junction(4)],
        arcs: vec![
            arc(1, 2, 5.0, 1e4, 10.0),
            arc(2, 4, 5.0, 1e4, 10.0),
            arc(1, 3, 6.0, 1e4, 10.0),
            arc(3, 4, 6.0, 1e4, 10.0),
        ],
        od_pairs: vec![OdPair {
            e_0: 55.0,
            ..od(1, 4, 10.0)
        }],
        time_value: 1.0,
        evcs_p_max_kw: 1e5,
    };
    let paths = enumerate_paths(&case).unwrap();
    assert_eq!(paths.per_od[0].len(), 2);
    let (ir, vars) = build_tn_ir(&case, &paths, &small_pwl()).unwrap();
    let sol = solve_micp_linear(&ir, &SolveOptions::default()).unwrap();
    assert!(sol.is_optimal());
    let r = extract_routing(&sol, &case, &paths, &vars);
    let odr = &r.per_od[0];
    // paths sorted by node sequence: [1,2,4] first
    assert!((odr.paths[0].flow - 10.0).abs() < 1e-6);
    assert!(odr.paths[1].flow.abs() < 1e-6);
    assert!(!odr.paths[1].used);
    // the 2-segment BPR grid interpolates slightly above t0 at x = 10
    assert!((odr.equilibrium_cost - 10.0).abs() < 0.05, "{}", odr.equilibrium_cost);
    // complementarity certificate: used path at od cost, unused above it
    assert!((odr.paths[0].cost - odr.equilibrium_cost).abs() < 1e-6);
    assert!(odr.paths[1].cost >= odr.equilibrium_cost - 1e-6);
}

#[test]
fn bpr_pwl_breakpoint_values_exact() {
    // x = 0 and x = capacity are breakpoints of the 8-segment sqrt grid on
    // [0, 2c]; the interpolation is exact there
    let (t0, cap) = (120.0, 40.0);
    let bps = bpr_breakpoints(2.0 * cap, 8);
    assert!((bps[0] - 0.0).abs() < 1e-12);
    assert!(bps.iter().any(|&b| (b - cap).abs() < 1e-9), "{bps:?}");
    assert!((bpr_time(t0, cap, 0.0) - t0).abs() < 1e-12);
    assert!((bpr_time(t0, cap, cap) - 1.15 * t0).abs() < 1e-9);
}

#[test]
fn bpr_pwl_error_within_two_percent() {
    // 1000-point grid oracle over [0, 2c] at 8 segments
    let (t0, cap) = (120.0, 40.0);
    let x_max = 2.0 * cap;
    let bps = bpr_breakpoints(x_max, 8);
    let interp = |x: f64| -> f64 {
        let i = bps.partition_point(|&b| b <= x).min(bps.len() - 1);
        let (a, b) = (bps[i - 1], bps[i]);
        let w = (x - a) / (b - a);
        (1.0 - w) * bpr_time(t0, cap, a) + w * bpr_time(t0, cap, b)
    };
    let mut worst = 0.0f64;
    for k in 0..=1000 {
        let x = x_max * k as f64 / 1000.0;
        let err = (interp(x.max(1e-12)) - bpr_time(t0, cap, x)).abs();
        worst = worst.max(err);
    }
    assert!(
        worst <= 0.02 * t0,
        "max PWL error {worst} exceeds 2% of t0 = {}",
        0.02 * t0
    );
}

#[test]
fn coupling_product_within_declared_tolerance() {
    // the PWL product representation (interpolating weights on both square
    // grids) stays within the declared tolerance of the exact product
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (f_max, e_max, segments) = (30.0f64, 55.0f64, 8usize);
    let tol = coupling_pwl_tolerance(f_max, e_max, segments);
    let sq_interp = |lo: f64, hi: f64, z: f64| -> f64 {
        let bps = model_tn::square_breakpoints(lo, hi, segments);
        let i = bps.partition_point(|&b| b <= z).clamp(1, bps.len() - 1);
        let (a, b) = (bps[i - 1], bps[i]);
        let w = (z - a) / (b - a);
        (1.0 - w) * a * a + w * b * b
    };
    for _ in 0..1000 {
        let f = rng.gen_range(0.0..f_max);
        let e = rng.gen_range(0.0..e_max);
        let z1 = 0.5 * (f + e);
        let z2 = 0.5 * (f - e);
        let prod = sq_interp(0.0, 0.5 * (f_max + e_max), z1)
            - sq_interp(-0.5 * e_max, 0.5 * f_max, z2);
        assert!(
            (prod - f * e).abs() <= tol + 1e-9,
            "pwl {} vs exact {} (tol {tol})",
            prod,
            f * e
        );
    }
    // the idle point is exact: both grids have a breakpoint at zero
    assert!(sq_interp(0.0, 0.5 * (f_max + e_max), 0.0).abs() < 1e-12);
    assert!(sq_interp(-0.5 * e_max, 0.5 * f_max, 0.0).abs() < 1e-12);
}

#[test]
fn augmented_objective_identity_and_penalty() {
    let case = model_tn::case1_tn();
    let paths = enumerate_paths(&case).unwrap();
    let (ir, _) = build_tn_ir(&case, &paths, &small_pwl()).unwrap();
    let same = attach_augmented_objective_tn(&ir, &[0.0; 3], &[0.0; 3], 0.0).unwrap();
    assert_eq!(same.obj_lin, ir.obj_lin);
    assert!(same.obj_quad.is_empty());
    // single-station arithmetic: p_T forced to 1, z = 0, gamma = 2 adds 1
    let aug = attach_augmented_objective_tn(&ir, &[0.0; 3], &[0.0; 3], 2.0).unwrap();
    let pt = aug.boundary_vars["p_T"][0];
    let mut x = vec![0.0; aug.num_vars()];
    x[pt.index()] = 1.0;
    assert!((aug.objective_value(&x) - ir.objective_value(&x) - 1.0).abs() < 1e-12);
}

#[test]
fn reduced_case_matches_enumeration() {
    // one-directional slice of the 5-node case at coarse PWL grids: small
    // enough for exhaustive enumeration over every binary and SOS2 window
    let mut case = model_tn::case1_tn();
    case.od_pairs = vec![od(1, 4, 8.0)];
    let paths = enumerate_paths(&case).unwrap();
    let pwl = PwlConfig {
        bpr_segments: 1,
        bpr_xmax_factor: 2.0,
        coupling_segments: 2,
    };
    let (ir, vars) = build_tn_ir(&case, &paths, &pwl).unwrap();
    let bb = solve_micp_linear(&ir, &SolveOptions::default()).unwrap();
    assert!(bb.is_optimal());

    // exhaustive oracle
    let binaries = ir.binary_vars();
    let windows: Vec<(String, usize)> = ir
        .sos2
        .iter()
        .map(|s| (s.label.clone(), s.members.len() - 1))
        .collect();
    let mut best = f64::INFINITY;
    let n_bin = binaries.len();
    let n_win: usize = windows.iter().map(|(_, w)| w).product();
    assert!(n_bin <= 5 && n_win <= 256, "enumeration blew up: 2^{n_bin} * {n_win}");
    for bpat in 0..(1usize << n_bin) {
        let assignment: BTreeMap<_, _> = binaries
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, ((bpat >> i) & 1) as f64))
            .collect();
        for wpat in 0..n_win {
            let mut code = wpat;
            let mut wmap = BTreeMap::new();
            for (label, count) in &windows {
                wmap.insert(label.clone(), code % count);
                code /= count;
            }
            let fixed = ir
                .fix_binaries(&assignment)
                .unwrap()
                .fix_sos2_windows(&wmap)
                .unwrap();
            let sol = solve_qp(&fixed, &SolveOptions::default()).unwrap();
            if sol.status == SolveStatus::Optimal && sol.objective < best {
                best = sol.objective;
            }
        }
    }
    assert!(
        (bb.objective - best).abs() / best.abs().max(1.0) < 1e-6,
        "bb {} vs enumeration {}",
        bb.objective,
        best
    );
    // the winning routing uses both path shapes or one, but flows conserve
    let r = extract_routing(&bb, &case, &paths, &vars);
    let total: f64 = r.per_od[0].paths.iter().map(|p| p.flow).sum();
    assert!((total - 8.0).abs() < 1e-6);
}

#[test]
fn energy_infeasible_path_rejected() {
    // 300-mile hop with a 55 kWh battery cannot work even charging everywhere
    let case = TnCase {
        name: "desert".into(),
        nodes: vec![junction(1), station(2, 0.08), junction(3)],
        arcs: vec![arc(1, 2, 10.0, 50.0, 300.0), arc(2, 3, 10.0, 50.0, 20.0)],
        od_pairs: vec![od(1, 3, 5.0)],
        time_value: 0.5,
        evcs_p_max_kw: 1e5,
    };
    let paths = enumerate_paths(&case).unwrap();
    assert!(build_tn_ir(&case, &paths, &small_pwl()).is_err());
}

#[test]
fn binary_count_stays_modest_for_case1() {
    let case = model_tn::case1_tn();
    let paths = enumerate_paths(&case).unwrap();
    let (ir, _) = build_tn_ir(&case, &paths, &PwlConfig::default()).unwrap();
    assert!(ir.validate().is_empty());
    let nb = ir.binary_vars().len();
    // 4 path-use + 6 charging binaries
    assert_eq!(nb, 10, "binaries {nb}");
    assert_eq!(ir.sos2.len(), 10 + 12, "sos2 sets {}", ir.sos2.len());
}
