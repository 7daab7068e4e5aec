use std::collections::BTreeMap;
use model_tn::*;
fn main() {
    let mut case = case1_tn();
    case.od_pairs = vec![OdPair { origin: 1, dest: 4, demand: 8.0, e_max: 55.0, e_min: 5.5, e_0: 50.0, kwh_per_mile: 0.2, anxiety: 0.05 }];
    let paths = enumerate_paths(&case).unwrap();
    let pwl = PwlConfig { bpr_segments: 1, bpr_xmax_factor: 2.0, coupling_segments: 2 };
    let (ir, _) = build_tn_ir(&case, &paths, &pwl).unwrap();
    // enumerate binary patterns with SOS2 windows; count feasible
    let binaries = ir.binary_vars();
    let windows: Vec<(String, usize)> = ir.sos2.iter().map(|s| (s.label.clone(), s.members.len()-1)).collect();
    let n_win: usize = windows.iter().map(|(_, w)| w).product();
    println!("bins {} windows {}", binaries.len(), n_win);
    let mut best = f64::INFINITY;
    let mut n_feas = 0;
    for bpat in 0..(1usize << binaries.len()) {
        let assignment: BTreeMap<_,_> = binaries.iter().enumerate().map(|(i,&b)| (b, ((bpat>>i)&1) as f64)).collect();
        for wpat in 0..n_win {
            let mut code = wpat;
            let mut wmap = BTreeMap::new();
            for (label, count) in &windows { wmap.insert(label.clone(), code % count); code /= count; }
            let fixed = ir.fix_binaries(&assignment).unwrap().fix_sos2_windows(&wmap).unwrap();
            let sol = opt_solve::solve_qp(&fixed, &opt_solve::SolveOptions::default()).unwrap();
            if sol.status == opt_ir::SolveStatus::Optimal {
                n_feas += 1;
                if sol.objective < best { best = sol.objective; }
            }
        }
    }
    println!("feasible patterns {n_feas}, best {best}");
}
