//! Built-in feeder reconstructions.
//!
//! The 13-node feeder is a balanced single-phase equivalent of the IEEE
//! 13-node test feeder (loads lumped per bus and scaled to leave headroom for
//! EVCS demand under the root line rating); the 33-node feeder uses the
//! standard Baran-Wu branch and load table. Per-unit base 1 MVA at 4.16 kV /
//! 12.66 kV respectively. Both carry a 200 kW PV unit at the EVCS bus.

use crate::{PdnCase, PdnLine, PdnNode};

/// Case-1 couplings: (EVCS feeder node, grid price $/MWh) per feeder.
pub const CASE1_FEEDERS: [(&str, f64); 3] = [("633", 70.47), ("650", 77.52), ("680", 84.57)];

/// Case-2 couplings: (EVCS feeder node, grid price $/MWh) per feeder.
pub const CASE2_FEEDERS: [(&str, f64); 4] =
    [("3", 70.47), ("4", 77.52), ("5", 84.57), ("6", 91.62)];

const PV_MW: f64 = 0.2;
const V_MIN: f64 = 0.81; // 0.90^2
const V_MAX: f64 = 1.1025; // 1.05^2

/// 13-node feeder reconstruction. `index` 0..3 selects the EVCS bus and the
/// grid price per the Case-1 coupling table.
pub fn case1_feeder(index: usize) -> PdnCase {
    let (evcs_node, price) = CASE1_FEEDERS[index];
    // (id, p_load MW, q_load MVAr) — balanced equivalents scaled by 0.8
    let loads: [(&str, f64, f64); 13] = [
        ("650", 0.0, 0.0),
        ("632", 0.0, 0.0),
        ("633", 0.0, 0.0),
        ("634", 0.32, 0.232),
        ("645", 0.136, 0.10),
        ("646", 0.184, 0.106),
        ("671", 0.924, 0.528),
        ("684", 0.0, 0.0),
        ("611", 0.136, 0.064),
        ("652", 0.102, 0.069),
        ("680", 0.0, 0.0),
        ("692", 0.136, 0.121),
        ("675", 0.674, 0.370),
    ];
    // (from, to, length kft); impedance 0.015 + j0.030 ohm/kft at 17.31 ohm base
    // (heavy conductor: the feeder must hold 0.95 pu without regulators)
    let lines: [(&str, &str, f64); 12] = [
        ("650", "632", 2.0),
        ("632", "633", 0.5),
        ("633", "634", 0.3),
        ("632", "645", 0.5),
        ("645", "646", 0.3),
        ("632", "671", 2.0),
        ("671", "684", 0.3),
        ("684", "611", 0.3),
        ("684", "652", 0.8),
        ("671", "680", 1.0),
        ("671", "692", 0.1),
        ("692", "675", 0.5),
    ];
    let z_base = 4.16 * 4.16; // ohms at 1 MVA
    let nodes = loads
        .iter()
        .map(|&(id, p, q)| PdnNode {
            id: id.into(),
            p_load: p,
            q_load: q,
            pv_p: if id == evcs_node { PV_MW } else { 0.0 },
            has_evcs: id == evcs_node,
            v_min: V_MIN,
            v_max: V_MAX,
        })
        .collect();
    let lines = lines
        .iter()
        .map(|&(from, to, kft)| {
            let s_max = if from == "650" { 8.0 } else { 6.0 };
            PdnLine {
                from: from.into(),
                to: to.into(),
                r: 0.090 * kft / z_base,
                x: 0.045 * kft / z_base,
                ell_max: 1.2 * s_max * s_max,
                s_max,
            }
        })
        .collect();
    PdnCase {
        name: format!("case1-feeder{}", index + 1),
        nodes,
        lines,
        grid_node: "650".into(),
        grid_price: price,
        evcs_pf_angle: 0.95f64.acos(),
        evcs_p_max_kw: 5000.0,
        v_root: 1.1025,
    }
}

/// 33-node feeder (standard Baran-Wu data). `index` 0..4 selects the EVCS
/// bus and the grid price per the Case-2 coupling table.
pub fn case2_feeder(index: usize) -> PdnCase {
    let (evcs_node, price) = CASE2_FEEDERS[index];
    // (from, to, R ohm, X ohm, P_to kW, Q_to kvar)
    #[rustfmt::skip]
    let branches: [(u32, u32, f64, f64, f64, f64); 32] = [
        (1, 2, 0.0922, 0.0470, 100.0, 60.0),
        (2, 3, 0.4930, 0.2511, 90.0, 40.0),
        (3, 4, 0.3660, 0.1864, 120.0, 80.0),
        (4, 5, 0.3811, 0.1941, 60.0, 30.0),
        (5, 6, 0.8190, 0.7070, 60.0, 20.0),
        (6, 7, 0.1872, 0.6188, 200.0, 100.0),
        (7, 8, 0.7114, 0.2351, 200.0, 100.0),
        (8, 9, 1.0300, 0.7400, 60.0, 20.0),
        (9, 10, 1.0440, 0.7400, 60.0, 20.0),
        (10, 11, 0.1966, 0.0650, 45.0, 30.0),
        (11, 12, 0.3744, 0.1238, 60.0, 35.0),
        (12, 13, 1.4680, 1.1550, 60.0, 35.0),
        (13, 14, 0.5416, 0.7129, 120.0, 80.0),
        (14, 15, 0.5910, 0.5260, 60.0, 10.0),
        (15, 16, 0.7463, 0.5450, 60.0, 20.0),
        (16, 17, 1.2890, 1.7210, 60.0, 20.0),
        (17, 18, 0.7320, 0.5740, 90.0, 40.0),
        (2, 19, 0.1640, 0.1565, 90.0, 40.0),
        (19, 20, 1.5042, 1.3554, 90.0, 40.0),
        (20, 21, 0.4095, 0.4784, 90.0, 40.0),
        (21, 22, 0.7089, 0.9373, 90.0, 40.0),
        (3, 23, 0.4512, 0.3083, 90.0, 50.0),
        (23, 24, 0.8980, 0.7091, 420.0, 200.0),
        (24, 25, 0.8960, 0.7011, 420.0, 200.0),
        (6, 26, 0.2030, 0.1034, 60.0, 25.0),
        (26, 27, 0.2842, 0.1447, 60.0, 25.0),
        (27, 28, 1.0590, 0.9337, 60.0, 20.0),
        (28, 29, 0.8042, 0.7006, 120.0, 70.0),
        (29, 30, 0.5075, 0.2585, 200.0, 600.0),
        (30, 31, 0.9744, 0.9630, 150.0, 70.0),
        (31, 32, 0.3105, 0.3619, 210.0, 100.0),
        (32, 33, 0.3410, 0.5302, 60.0, 40.0),
    ];
    let z_base = 12.66 * 12.66;
    let mut nodes: Vec<PdnNode> = (1..=33)
        .map(|i| {
            let id = i.to_string();
            PdnNode {
                id: id.clone(),
                p_load: 0.0,
                q_load: 0.0,
                pv_p: if id == evcs_node { PV_MW } else { 0.0 },
                has_evcs: id == evcs_node,
                v_min: 0.81, // 0.90^2: the full feeder dips below 0.95 pu
                v_max: V_MAX,
            }
        })
        .collect();
    for &(_, to, _, _, p, q) in &branches {
        let n = &mut nodes[(to - 1) as usize];
        n.p_load = p / 1000.0;
        n.q_load = q / 1000.0;
    }
    let lines = branches
        .iter()
        .map(|&(from, to, r, x, _, _)| {
            let s_max = if from == 1 { 12.0 } else { 8.0 };
            PdnLine {
                from: from.to_string(),
                to: to.to_string(),
                r: r / z_base,
                x: x / z_base,
                ell_max: 1.2 * s_max * s_max,
                s_max,
            }
        })
        .collect();
    PdnCase {
        name: format!("case2-feeder{}", index + 1),
        nodes,
        lines,
        grid_node: "1".into(),
        grid_price: price,
        evcs_pf_angle: 0.95f64.acos(),
        evcs_p_max_kw: 8000.0,
        v_root: 1.1025,
    }
}
