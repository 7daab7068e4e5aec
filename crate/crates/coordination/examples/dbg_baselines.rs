use coordination::*;
use opt_solve::SolveOptions;

fn main() {
    let feeders: Vec<_> = (0..3).map(model_pdn::case1_feeder).collect();
    let (pdn_ir, _) = model_pdn::build_pdn_multi(&feeders).unwrap();
    let tn = model_tn::case1_tn();
    let paths = model_tn::enumerate_paths(&tn).unwrap();
    let (tn_ir, _) = model_tn::build_tn_ir(&tn, &paths, &model_tn::PwlConfig::default()).unwrap();
    let opts = SolveOptions::default();

    let t0 = std::time::Instant::now();
    let v = run_coordination(AlgoKind::Vils, &pdn_ir, &tn_ir, &AlgoParams::default(), &opts, TransportKind::InProc).unwrap();
    println!("VILS: {:?} outer {} inner {} obj {:.2} gap {:.5} r {:.2} in {:?}",
        v.status, v.outer_iterations, v.total_inner, v.objective(), v.gap, v.residual_inf, t0.elapsed());

    for j in [1usize, 2, 4, 8] {
        let mut p = AlgoParams::default();
        p.inner_loop_fixed = Some(j);
        let t = std::time::Instant::now();
        let s = run_coordination(AlgoKind::Sdmgs, &pdn_ir, &tn_ir, &p, &opts, TransportKind::InProc).unwrap();
        println!("SDMGS J={j}: {:?} outer {} inner {} obj {:.2} gap {:.5} r {:.2} in {:?}",
            s.status, s.outer_iterations, s.total_inner, s.objective(), s.gap, s.residual_inf, t.elapsed());
    }

    let mut p = AlgoParams::default();
    p.max_outer = 300;
    let t = std::time::Instant::now();
    let a = run_coordination(AlgoKind::Admm, &pdn_ir, &tn_ir, &p, &opts, TransportKind::InProc).unwrap();
    println!("ADMM: {:?} outer {} obj {:.2} residual {:.3} in {:?}",
        a.status, a.outer_iterations, a.objective(), a.residual_inf, t.elapsed());

    // centralized cross-check
    let central = build_centralized(&pdn_ir, &tn_ir).unwrap();
    let t = std::time::Instant::now();
    let c = opt_solve::solve_micp_linear(&central, &opts).unwrap();
    println!("CENTRAL: {:?} obj {:.2} in {:?}", c.status, c.objective, t.elapsed());
    println!("rel diff vils vs central: {:.3e}", (v.objective() - c.objective).abs() / c.objective.abs());
}
