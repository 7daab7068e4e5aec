use coordination::*;
use opt_solve::SolveOptions;

fn main() {
    let feeders: Vec<_> = (0..3).map(model_pdn::case1_feeder).collect();
    let (pdn_ir, _) = model_pdn::build_pdn_multi(&feeders).unwrap();
    let tn = model_tn::case1_tn();
    let paths = model_tn::enumerate_paths(&tn).unwrap();
    let (tn_ir, _) = model_tn::build_tn_ir(&tn, &paths, &model_tn::PwlConfig::default()).unwrap();
    println!("pdn vars {} / tn vars {}", pdn_ir.num_vars(), tn_ir.num_vars());
    let params = AlgoParams::default();
    let t0 = std::time::Instant::now();
    let out = run_coordination(AlgoKind::Vils, &pdn_ir, &tn_ir, &params, &SolveOptions::default(), TransportKind::InProc).unwrap();
    println!("status {:?} outer {} inner {} in {:?}", out.status, out.outer_iterations, out.total_inner, t0.elapsed());
    println!("objective {} = f_p {} + f_v {}", out.objective(), out.objective_p, out.objective_v);
    println!("gap {} residual_inf {}", out.gap, out.residual_inf);
    println!("p_d {:?}", out.p_d);
    println!("p_t {:?}", out.p_t);
    println!("lambda_p {:?}", out.lambda_p);
    for row in out.trace.rows.iter().take(8) {
        println!("k={} J={} up={:.4} low={:.4} gap={:.4} r={:.2} {}", row.k, row.inner_count, row.phi_up, row.phi_low, row.gap, row.residual_inf, row.step_type);
    }
    println!("...");
    for row in out.trace.rows.iter().rev().take(5).collect::<Vec<_>>().iter().rev() {
        println!("k={} J={} up={:.4} low={:.4} gap={:.4} r={:.2} {}", row.k, row.inner_count, row.phi_up, row.phi_low, row.gap, row.residual_inf, row.step_type);
    }
    if !out.trace.warnings.is_empty() {
        println!("warnings: {:?}", out.trace.warnings.len());
    }
}
