use model_tn::*;
fn main() {
    let mut case = case1_tn();
    case.od_pairs = vec![OdPair { origin: 1, dest: 4, demand: 8.0, e_max: 55.0, e_min: 5.5, e_0: 50.0, kwh_per_mile: 0.2, anxiety: 0.05 }];
    let paths = enumerate_paths(&case).unwrap();
    let pwl = PwlConfig { bpr_segments: 1, bpr_xmax_factor: 2.0, coupling_segments: 2 };
    let (ir, _) = build_tn_ir(&case, &paths, &pwl).unwrap();
    println!("vars {} rows {} sos2 {} bins {}", ir.num_vars(), ir.lin.len(), ir.sos2.len(), ir.binary_vars().len());
    let t0 = std::time::Instant::now();
    let sol = opt_solve::solve_micp_linear(&ir, &opt_solve::SolveOptions::default()).unwrap();
    println!("status {:?} obj {} bound {} in {:?}", sol.status, sol.objective, sol.bound, t0.elapsed());
}
