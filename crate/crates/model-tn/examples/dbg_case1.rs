use model_tn::*;
fn main() {
    let case = case1_tn();
    let paths = enumerate_paths(&case).unwrap();
    let (ir, vars) = build_tn_ir(&case, &paths, &PwlConfig::default()).unwrap();
    println!("vars {} rows {} sos2 {} bins {}", ir.num_vars(), ir.lin.len(), ir.sos2.len(), ir.binary_vars().len());
    let t0 = std::time::Instant::now();
    let sol = opt_solve::solve_micp_linear(&ir, &opt_solve::SolveOptions::default()).unwrap();
    println!("status {:?} obj {:.3} in {:?}", sol.status, sol.objective, t0.elapsed());
    let r = extract_routing(&sol, &case, &paths, &vars);
    for odr in &r.per_od {
        for p in &odr.paths {
            if p.flow > 1e-6 {
                println!("  {:?} flow {:.2} cost {:.2} stops {:?}", p.nodes, p.flow, p.cost,
                    p.stops.iter().filter(|s| s.charging).map(|s| (s.node, s.kwh)).collect::<Vec<_>>());
            }
        }
    }
    println!("stations {:?}", r.station_kw);
    // warm re-solve with hint
    let plan = ir.fix_plan_from(&sol.values);
    let t1 = std::time::Instant::now();
    let sol2 = opt_solve::solve_micp_linear(&ir, &opt_solve::SolveOptions { hint: Some(plan), ..Default::default() }).unwrap();
    println!("warm resolve {:?} obj {:.3} in {:?}", sol2.status, sol2.objective, t1.elapsed());
}
