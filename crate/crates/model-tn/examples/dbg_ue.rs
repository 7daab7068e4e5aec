use model_tn::*;
fn main() {
    let station = |id: u32, price: f64| TnNode {
        id,
        has_evcs: true,
        b_max: 55.0,
        pile_kw: 150.0,
        wait_base_min: 10.0,
        congestion_min_per_veh: 0.2,
        price_per_kwh: price,
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
    let arc = |from: u32, to: u32, t0: f64, cap: f64, miles: f64| TnArc {
        from,
        to,
        t0_min: t0,
        capacity: cap,
        miles,
    };
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
            origin: 1,
            dest: 4,
            demand: 10.0,
            e_max: 55.0,
            e_min: 5.5,
            e_0: 55.0,
            kwh_per_mile: 0.2,
            anxiety: 0.05,
        }],
        time_value: 1.0,
        evcs_p_max_kw: 1e5,
    };
    let paths = enumerate_paths(&case).unwrap();
    let pwl = PwlConfig {
        bpr_segments: 2,
        bpr_xmax_factor: 2.0,
        coupling_segments: 2,
    };
    let (ir, vars) = build_tn_ir(&case, &paths, &pwl).unwrap();
    let sol = opt_solve::solve_micp_linear(&ir, &opt_solve::SolveOptions::default()).unwrap();
    println!("status {:?} obj {}", sol.status, sol.objective);
    let r = extract_routing(&sol, &case, &paths, &vars);
    for p in &r.per_od[0].paths {
        println!(
            "path {:?} flow {:.3} used {} cost {:.4}",
            p.nodes, p.flow, p.used, p.cost
        );
    }
    for (ai, t) in &vars.arc_t {
        println!(
            "arc {} t={:.4} x={:.4}",
            ai,
            sol.values[t.index()],
            sol.values[vars.arc_x[ai].index()]
        );
    }
    for (m, t) in &vars.node_t {
        println!(
            "node {} tm={:.4} xm={:.4}",
            m,
            sol.values[t.index()],
            sol.values[vars.node_x[m].index()]
        );
    }
    for odv in &vars.per_od {
        for pv in &odv.paths {
            for s in &pv.stops {
                println!(
                    "stop @{} gam={} wg={:.4} fg={:.4} E={:.4}",
                    s.node,
                    sol.values[s.charging.index()],
                    sol.values[s.wait_product.index()],
                    sol.values[s.flow_product.index()],
                    sol.values[s.charge.index()],
                );
            }
        }
    }
}
