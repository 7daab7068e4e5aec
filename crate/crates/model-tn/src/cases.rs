//! Built-in road networks.
//!
//! Case 1 is the 5-node network: a 3-arc corridor 1-2-3-4 with stations at 2
//! and 3, and the alternative 1-5-4 through station 5. Case 2 is the
//! Nguyen-Dupuis network with stations at 6, 7, 9, 10; its arc parameters are
//! the classic free-flow numbers scaled to minutes/miles. EV fleet parameters
//! are sized so each retained path needs every station it passes.

use crate::{OdPair, TnArc, TnCase, TnNode};

fn station(id: u32, price_per_kwh: f64) -> TnNode {
    TnNode {
        id,
        has_evcs: true,
        b_max: 55.0,
        pile_kw: 150.0,
        wait_base_min: 10.0,
        congestion_min_per_veh: 0.2,
        price_per_kwh,
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

fn both_ways(arcs: &mut Vec<TnArc>, a: u32, b: u32, t0: f64, cap: f64, miles: f64) {
    arcs.push(TnArc {
        from: a,
        to: b,
        t0_min: t0,
        capacity: cap,
        miles,
    });
    arcs.push(TnArc {
        from: b,
        to: a,
        t0_min: t0,
        capacity: cap,
        miles,
    });
}

fn ev(origin: u32, dest: u32, demand: f64) -> OdPair {
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

/// 5-node network, stations at 2/3/5 priced from their supplying feeders,
/// demand 30 vehicles each way between 1 and 4. The fleet parameters make
/// every station on a retained path a required stop, matching the published
/// charging pattern.
pub fn case1_tn() -> TnCase {
    let mut arcs = Vec::new();
    both_ways(&mut arcs, 1, 2, 120.0, 40.0, 150.0);
    both_ways(&mut arcs, 2, 3, 130.0, 40.0, 150.0);
    both_ways(&mut arcs, 3, 4, 120.0, 40.0, 150.0);
    both_ways(&mut arcs, 1, 5, 195.0, 47.0, 225.0);
    both_ways(&mut arcs, 5, 4, 195.0, 47.0, 225.0);
    TnCase {
        name: "case1-tn".into(),
        nodes: vec![
            junction(1),
            station(2, 70.47e-3),
            station(3, 77.52e-3),
            junction(4),
            station(5, 84.57e-3),
        ],
        arcs,
        od_pairs: vec![ev(1, 4, 30.0), ev(4, 1, 30.0)],
        time_value: 0.5,
        evcs_p_max_kw: 3000.0,
    }
}

/// Nguyen-Dupuis network, stations at 6/7/9/10, four O-D pairs of 60
/// vehicles. Free-flow times and lengths scale the classic arc constants by
/// 10 (minutes, miles).
pub fn case2_tn() -> TnCase {
    let classic: [(u32, u32, f64); 19] = [
        (1, 5, 7.0),
        (1, 12, 9.0),
        (4, 5, 9.0),
        (4, 9, 12.0),
        (5, 6, 3.0),
        (5, 9, 9.0),
        (6, 7, 5.0),
        (6, 10, 13.0),
        (7, 8, 5.0),
        (7, 11, 9.0),
        (8, 2, 9.0),
        (9, 10, 10.0),
        (9, 13, 9.0),
        (10, 11, 6.0),
        (11, 2, 9.0),
        (11, 3, 8.0),
        (12, 6, 7.0),
        (12, 8, 14.0),
        (13, 3, 11.0),
    ];
    let arcs = classic
        .iter()
        .map(|&(from, to, c)| TnArc {
            from,
            to,
            t0_min: 10.0 * c,
            capacity: 150.0,
            miles: 10.0 * c,
        })
        .collect();
    let nodes = (1..=13)
        .map(|id| match id {
            6 => station(6, 70.47e-3),
            7 => station(7, 77.52e-3),
            9 => station(9, 84.57e-3),
            10 => station(10, 91.62e-3),
            other => junction(other),
        })
        .collect();
    TnCase {
        name: "case2-tn".into(),
        nodes,
        arcs,
        od_pairs: vec![ev(1, 2, 60.0), ev(1, 3, 60.0), ev(4, 2, 60.0), ev(4, 3, 60.0)],
        time_value: 0.5,
        evcs_p_max_kw: 6000.0,
    }
}
