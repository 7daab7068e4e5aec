use std::collections::BTreeMap;
use model_tn::*;
use opt_ir::SolveStatus;
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
    let windows: Vec<(String, usize)> = ir.sos2.iter().map(|s| (s.label.clone(), s.members.len()-1)).collect();
    let n_win: usize = windows.iter().map(|(_, w)| w).product();
    let mut best = f64::INFINITY;
    let mut best_pat = (0usize, 0usize);
    for bpat in 0..(1usize << binaries.len()) {
        let assignment: BTreeMap<_,_> = binaries.iter().enumerate().map(|(i,&b)| (b, ((bpat>>i)&1) as f64)).collect();
        for wpat in 0..n_win {
            let mut code = wpat;
            let mut wmap = BTreeMap::new();
            for (label, count) in &windows { wmap.insert(label.clone(), code % count); code /= count; }
            let fixed = ir.fix_binaries(&assignment).unwrap().fix_sos2_windows(&wmap).unwrap();
            let sol = opt_solve::solve_qp(&fixed, &opt_solve::SolveOptions::default()).unwrap();
            if sol.status == SolveStatus::Optimal && sol.objective < best {
                best = sol.objective;
                best_pat = (bpat, wpat);
            }
        }
    }
    println!("enumeration best {best} at pattern {best_pat:?} ({} binaries: {:?})", binaries.len(),
        binaries.iter().enumerate().map(|(i,_)| (best_pat.0>>i)&1).collect::<Vec<_>>());
    let bb = opt_solve::solve_micp_linear(&ir, &opt_solve::SolveOptions::default()).unwrap();
    println!("bb {} ({:?})", bb.objective, bb.status);
}
