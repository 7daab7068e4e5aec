use std::collections::BTreeMap;
use model_tn::*;
fn main() {
    let station = |id: u32, price: f64| TnNode { id, has_evcs: true, b_max: 55.0, pile_kw: 150.0, wait_base_min: 10.0, congestion_min_per_veh: 0.2, price_per_kwh: price };
    let junction = |id: u32| TnNode { id, has_evcs: false, b_max: 0.0, pile_kw: 1.0, wait_base_min: 0.0, congestion_min_per_veh: 0.0, price_per_kwh: 0.0 };
    let arc = |from: u32, to: u32, t0: f64, cap: f64, miles: f64| TnArc { from, to, t0_min: t0, capacity: cap, miles };
    let case = TnCase {
        name: "ue".into(),
        nodes: vec![junction(1), station(2, 0.0), station(3, 0.0), junction(4)],
        arcs: vec![arc(1,2,5.0,1e4,10.0), arc(2,4,5.0,1e4,10.0), arc(1,3,6.0,1e4,10.0), arc(3,4,6.0,1e4,10.0)],
        od_pairs: vec![OdPair { origin:1, dest:4, demand:10.0, e_max:55.0, e_min:5.5, e_0:55.0, kwh_per_mile:0.2, anxiety:0.05 }],
        time_value: 1.0,
        evcs_p_max_kw: 1e5,
    };
    let paths = enumerate_paths(&case).unwrap();
    let pwl = PwlConfig { bpr_segments: 2, bpr_xmax_factor: 2.0, coupling_segments: 2 };
    let (ir, _) = build_tn_ir(&case, &paths, &pwl).unwrap();
    let binaries = ir.binary_vars();
    for (i, b) in binaries.iter().enumerate() {
        println!("bin {i}: {}", ir.vars[b.index()].name);
    }
    // pattern: nu_A=1, gam_A=0, nu_B=0, gam_B=0
    let vals = [1.0, 0.0, 0.0, 0.0];
    let assignment: BTreeMap<_,_> = binaries.iter().zip(vals).map(|(&b,v)| (b,v)).collect();
    let fixed = ir.fix_binaries(&assignment).unwrap();
    // SOS2 windows left free: relax instead (solve_qp needs windows fixed).
    // Try every window combo; report the best status seen.
    let windows: Vec<(String, usize)> = ir.sos2.iter().map(|s| (s.label.clone(), s.members.len()-1)).collect();
    let n_win: usize = windows.iter().map(|(_, w)| w).product();
    let mut best: Option<opt_ir::Solution> = None;
    for wpat in 0..n_win {
        let mut code = wpat;
        let mut wmap = BTreeMap::new();
        for (label, count) in &windows { wmap.insert(label.clone(), code % count); code /= count; }
        let f2 = fixed.fix_sos2_windows(&wmap).unwrap();
        let sol = opt_solve::solve_qp(&f2, &opt_solve::SolveOptions::default()).unwrap();
        if sol.status == opt_ir::SolveStatus::Optimal && best.as_ref().map_or(true, |b| sol.objective < b.objective) {
            best = Some(sol);
        }
    }
    match best {
        Some(sol) => println!("pattern feasible, best obj {}", sol.objective),
        None => println!("pattern infeasible at every window combo"),
    }
}
