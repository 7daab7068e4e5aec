use std::collections::BTreeMap;

use opt_ir::{
    LinConstraint, LinExpr, ProblemIR, QuadObjTerm, Sense, Solution, Sos2Set, VarId, VarKind,
};
use serde::{Deserialize, Serialize};

use crate::paths::PathSet;
use crate::{TnCase, TnError};

/// Piecewise-linearization grids.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PwlConfig {
    /// Segments of the BPR delay curve per arc.
    pub bpr_segments: usize,
    /// BPR domain as a multiple of arc capacity.
    pub bpr_xmax_factor: f64,
    /// Segments of each difference-of-squares grid in the coupling product.
    pub coupling_segments: usize,
}

impl Default for PwlConfig {
    fn default() -> Self {
        Self {
            bpr_segments: 8,
            bpr_xmax_factor: 2.0,
            coupling_segments: 8,
        }
    }
}

/// BPR delay at flow `x`: `t0 * (1 + 0.15 (x/c)^4)`.
pub fn bpr_time(t0: f64, capacity: f64, x: f64) -> f64 {
    t0 * (1.0 + 0.15 * (x / capacity).powi(4))
}

/// Breakpoints `x_i = x_max sqrt(i/n)`: spacing shrinks where the quartic
/// curves hardest, which keeps the 8-segment interpolation error under 2% of
/// `t0` on [0, 2c] (uniform spacing peaks near 5%). For n divisible by 4 and
/// `x_max = 2c` the capacity point lands exactly on a breakpoint.
pub fn bpr_breakpoints(x_max: f64, segments: usize) -> Vec<f64> {
    (0..=segments)
        .map(|i| x_max * (i as f64 / segments as f64).sqrt())
        .collect()
}

/// Worst-case `|pwl(f*E) - f*E|` for the shipped difference-of-squares grids:
/// each square contributes up to `h^2/4` with `h` the widest gap of its grid.
pub fn coupling_pwl_tolerance(f_max: f64, e_max: f64, segments: usize) -> f64 {
    let gap = |bps: &[f64]| {
        bps.windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0f64, f64::max)
    };
    let h1 = gap(&square_breakpoints(0.0, 0.5 * (f_max + e_max), segments));
    let h2 = gap(&square_breakpoints(-0.5 * e_max, 0.5 * f_max, segments));
    (h1 * h1 + h2 * h2) / 4.0
}

/// One charging opportunity on a path: position `pos` in the node sequence.
#[derive(Debug, Clone)]
pub struct StopVars {
    pub pos: usize,
    pub node: u32,
    /// Charged energy E, kWh.
    pub charge: VarId,
    /// Charging indicator.
    pub charging: VarId,
    /// Big-M product wait_time * charging.
    pub wait_product: VarId,
    /// Big-M product flow * charging (station queue contribution).
    pub flow_product: VarId,
    /// Station power drawn by this stop, kW: equals the difference of
    /// squares when charging, exactly zero otherwise.
    pub power: VarId,
    /// Difference-of-squares pieces of flow * charge.
    pub z1: VarId,
    pub z2: VarId,
    pub z1_sq: VarId,
    pub z2_sq: VarId,
}

#[derive(Debug, Clone)]
pub struct PathVars {
    pub flow: VarId,
    pub used: VarId,
    pub cost: VarId,
    /// Stored energy after each node of the path (index 0 = origin).
    pub energy: Vec<VarId>,
    pub stops: Vec<StopVars>,
    pub cost_upper: f64,
}

#[derive(Debug, Clone)]
pub struct OdVars {
    pub cost: VarId,
    pub paths: Vec<PathVars>,
}

#[derive(Debug, Clone)]
pub struct TnVars {
    /// Arc index -> (flow, delay) for arcs used by at least one path.
    pub arc_x: BTreeMap<usize, VarId>,
    pub arc_t: BTreeMap<usize, VarId>,
    /// Station node -> (queue flow, wait time).
    pub node_x: BTreeMap<u32, VarId>,
    pub node_t: BTreeMap<u32, VarId>,
    /// Station powers in declaration order (the `"p_T"` boundary group).
    pub p_t: Vec<(u32, VarId)>,
    pub per_od: Vec<OdVars>,
}

/// Maximum chargeable energy per visit at node `m` for an O-D's EVs.
fn charge_cap(case: &TnCase, node: u32, e_max: f64) -> f64 {
    case.node(node).unwrap().b_max.min(e_max)
}

/// Greedy charge-everywhere replay; `Err` when even that cannot finish the
/// path (such a path would make the whole program infeasible, since the
/// energy rows hold for unused paths too).
fn check_energy_feasible(case: &TnCase, od: &crate::OdPair, path: &crate::Path) -> Result<(), TnError> {
    let mut e = od.e_0;
    let floor = od.anxiety * od.e_max;
    for (hop, &ai) in path.arcs.iter().enumerate() {
        let need = case.arcs[ai].miles * od.kwh_per_mile;
        if e < need + floor - 1e-9 {
            return Err(TnError::EnergyInfeasiblePath {
                path: path.nodes.clone(),
            });
        }
        e -= need;
        let here = path.nodes[hop + 1];
        let n = case.node(here).unwrap();
        if n.has_evcs && od.e_max - e <= charge_cap(case, here, od.e_max) + 1e-9 {
            e = od.e_max;
        }
        // the stored-energy floor constrains the post-charge state
        if e < od.e_min - 1e-9 {
            return Err(TnError::EnergyInfeasiblePath {
                path: path.nodes.clone(),
            });
        }
    }
    Ok(())
}

/// Build the full TN subproblem over an enumerated path set.
pub fn build_tn_ir(
    case: &TnCase,
    paths: &PathSet,
    pwl: &PwlConfig,
) -> Result<(ProblemIR, TnVars), TnError> {
    case.validate()?;
    if pwl.bpr_segments < 1 || pwl.coupling_segments < 2 {
        // the coupling squares straddle zero and need a breakpoint there
        return Err(TnError::MissingBreakpoints(
            pwl.bpr_segments.min(pwl.coupling_segments),
        ));
    }
    if paths.per_od.len() != case.od_pairs.len() {
        return Err(TnError::Dimension {
            expected: case.od_pairs.len(),
            got: paths.per_od.len(),
        });
    }
    for (od, pp) in case.od_pairs.iter().zip(&paths.per_od) {
        for p in pp {
            check_energy_feasible(case, od, p)?;
        }
    }

    let mut ir = ProblemIR::new();
    let total_demand: f64 = case.od_pairs.iter().map(|od| od.demand).sum();

    // ---- arc flow, delay, and BPR grids (only arcs on some path) ----------
    let mut arc_flow_ub: BTreeMap<usize, f64> = BTreeMap::new();
    for (od, pp) in case.od_pairs.iter().zip(&paths.per_od) {
        for p in pp {
            for &ai in &p.arcs {
                *arc_flow_ub.entry(ai).or_insert(0.0) += od.demand;
            }
        }
    }
    let mut arc_x = BTreeMap::new();
    let mut arc_t = BTreeMap::new();
    for (&ai, &flow_ub) in &arc_flow_ub {
        let arc = &case.arcs[ai];
        let x_max = pwl.bpr_xmax_factor * arc.capacity;
        if flow_ub > x_max + 1e-9 {
            return Err(TnError::FlowExceedsPwlDomain {
                from: arc.from,
                to: arc.to,
                flow: flow_ub,
                domain: x_max,
            });
        }
        let tag = format!("{}-{}", arc.from, arc.to);
        let t_max = bpr_time(arc.t0_min, arc.capacity, x_max);
        let x = ir.new_var(format!("x[{tag}]"), 0.0, x_max, VarKind::Continuous)?;
        let t = ir.new_var(format!("t[{tag}]"), arc.t0_min, t_max, VarKind::Continuous)?;
        pwl_bpr(&mut ir, &tag, arc.t0_min, arc.capacity, x_max, pwl.bpr_segments, x, t)?;
        arc_x.insert(ai, x);
        arc_t.insert(ai, t);
    }

    // ---- station queue and wait time --------------------------------------
    let stations = case.stations();
    let mut node_x = BTreeMap::new();
    let mut node_t = BTreeMap::new();
    for &m in &stations {
        let n = case.node(m).unwrap();
        let x = ir.new_var(format!("xm[{m}]"), 0.0, total_demand, VarKind::Continuous)?;
        let t_max = n.wait_base_min * (1.0 + n.congestion_min_per_veh * total_demand);
        let t = ir.new_var(
            format!("tm[{m}]"),
            n.wait_base_min,
            t_max.max(n.wait_base_min),
            VarKind::Continuous,
        )?;
        // t_m = t0_m (1 + alpha_m x_m)
        let mut e = LinExpr::term(t, 1.0);
        e.add_term(x, -n.wait_base_min * n.congestion_min_per_veh);
        ir.push_row(LinConstraint::named(
            e,
            Sense::Eq,
            n.wait_base_min,
            format!("wait[{m}]"),
        ));
        node_x.insert(m, x);
        node_t.insert(m, t);
    }

    // ---- per-O-D / per-path structure -------------------------------------
    let mut per_od = Vec::new();
    for (oi, (od, pp)) in case.od_pairs.iter().zip(&paths.per_od).enumerate() {
        let mut path_vars = Vec::new();
        for (qi, p) in pp.iter().enumerate() {
            let tag = format!("od{oi}.q{qi}");
            let flow = ir.new_var(format!("f[{tag}]"), 0.0, od.demand, VarKind::Continuous)?;
            let used = ir.new_var(format!("nu[{tag}]"), 0.0, 1.0, VarKind::Binary)?;
            // f <= F * nu
            let mut e = LinExpr::term(flow, 1.0);
            e.add_term(used, -od.demand);
            ir.push_row(LinConstraint::named(e, Sense::Le, 0.0, format!("gate[{tag}]")));

            // stored energy along the path
            let mut energy = Vec::with_capacity(p.nodes.len());
            for (pos, &n) in p.nodes.iter().enumerate() {
                let (lo, hi) = if pos == 0 {
                    (od.e_0, od.e_0)
                } else {
                    (od.e_min, od.e_max)
                };
                energy.push(ir.new_var(
                    format!("e[{tag}.{pos}@{n}]"),
                    lo,
                    hi,
                    VarKind::Continuous,
                )?);
            }

            // charging stops at EVCS nodes after the origin
            let mut stops = Vec::new();
            for (pos, &m) in p.nodes.iter().enumerate().skip(1) {
                let n = case.node(m).unwrap();
                if !n.has_evcs {
                    continue;
                }
                let cap = charge_cap(case, m, od.e_max);
                let charge =
                    ir.new_var(format!("E[{tag}.{pos}@{m}]"), 0.0, cap, VarKind::Continuous)?;
                let charging =
                    ir.new_var(format!("gam[{tag}.{pos}@{m}]"), 0.0, 1.0, VarKind::Binary)?;
                let t_lo = n.wait_base_min;
                let t_hi = n.wait_base_min * (1.0 + n.congestion_min_per_veh * total_demand);
                let wait_product = ir.new_var(
                    format!("wg[{tag}.{pos}@{m}]"),
                    0.0,
                    t_hi,
                    VarKind::Continuous,
                )?;
                let flow_product = ir.new_var(
                    format!("fg[{tag}.{pos}@{m}]"),
                    0.0,
                    od.demand,
                    VarKind::Continuous,
                )?;
                // charge only when charging, and then charge to full:
                // E <= e_max * gam <= e (with e <= e_max from bounds)
                let mut e1 = LinExpr::term(charge, 1.0);
                e1.add_term(charging, -od.e_max);
                ir.push_row(LinConstraint::named(
                    e1,
                    Sense::Le,
                    0.0,
                    format!("chg_gate[{tag}.{pos}]"),
                ));
                let mut e2 = LinExpr::term(charging, od.e_max);
                e2.add_term(energy[pos], -1.0);
                ir.push_row(LinConstraint::named(
                    e2,
                    Sense::Le,
                    0.0,
                    format!("chg_full[{tag}.{pos}]"),
                ));
                // wait_product = t_m * charging (exact envelope on [t_lo, t_hi])
                let tm = node_t[&m];
                envelope_product(
                    &mut ir,
                    wait_product,
                    tm,
                    charging,
                    t_lo,
                    t_hi,
                    &format!("wg[{tag}.{pos}]"),
                );
                // flow_product = f * charging (exact envelope on [0, F])
                envelope_product(
                    &mut ir,
                    flow_product,
                    flow,
                    charging,
                    0.0,
                    od.demand,
                    &format!("fg[{tag}.{pos}]"),
                );
                // difference-of-squares pieces for flow * charge
                let (z1, z2, z1_sq, z2_sq) = coupling_squares(
                    &mut ir,
                    flow,
                    charge,
                    od.demand,
                    cap,
                    pwl.coupling_segments,
                    &format!("c[{tag}.{pos}]"),
                )?;
                // stop power: z1^2 - z2^2 while charging, exactly zero when
                // idle (the squares then cancel only up to grid error, so the
                // link is gated on the charging binary)
                let dip = coupling_pwl_tolerance(od.demand, cap, pwl.coupling_segments);
                let power = ir.new_var(
                    format!("P[{tag}.{pos}@{m}]"),
                    -dip,
                    od.demand * cap + dip,
                    VarKind::Continuous,
                )?;
                let z1_hi = 0.5 * (od.demand + cap);
                let gate_m = z1_hi * z1_hi + 0.25 * cap.max(od.demand).powi(2) + dip;
                let mut g1 = LinExpr::term(power, 1.0);
                g1.add_term(z1_sq, -1.0);
                g1.add_term(z2_sq, 1.0);
                g1.add_term(charging, gate_m);
                ir.push_row(LinConstraint::named(
                    g1,
                    Sense::Le,
                    gate_m,
                    format!("pw_link_hi[{tag}.{pos}]"),
                ));
                let mut g2 = LinExpr::term(power, 1.0);
                g2.add_term(z1_sq, -1.0);
                g2.add_term(z2_sq, 1.0);
                g2.add_term(charging, -gate_m);
                ir.push_row(LinConstraint::named(
                    g2,
                    Sense::Ge,
                    -gate_m,
                    format!("pw_link_lo[{tag}.{pos}]"),
                ));
                let mut g3 = LinExpr::term(power, 1.0);
                g3.add_term(charging, -(od.demand * cap + dip));
                ir.push_row(LinConstraint::named(
                    g3,
                    Sense::Le,
                    0.0,
                    format!("pw_gate_hi[{tag}.{pos}]"),
                ));
                let mut g4 = LinExpr::term(power, 1.0);
                g4.add_term(charging, dip);
                ir.push_row(LinConstraint::named(
                    g4,
                    Sense::Ge,
                    0.0,
                    format!("pw_gate_lo[{tag}.{pos}]"),
                ));
                stops.push(StopVars {
                    pos,
                    node: m,
                    charge,
                    charging,
                    wait_product,
                    flow_product,
                    power,
                    z1,
                    z2,
                    z1_sq,
                    z2_sq,
                });
            }

            // energy dynamics and range anxiety along each hop
            for (hop, &ai) in p.arcs.iter().enumerate() {
                let need = case.arcs[ai].miles * od.kwh_per_mile;
                let mut dyn_row = LinExpr::term(energy[hop + 1], 1.0);
                dyn_row.add_term(energy[hop], -1.0);
                if let Some(stop) = stops.iter().find(|s| s.pos == hop + 1) {
                    dyn_row.add_term(stop.charge, -1.0);
                }
                ir.push_row(LinConstraint::named(
                    dyn_row,
                    Sense::Eq,
                    -need,
                    format!("dyn[{tag}.{hop}]"),
                ));
                ir.push_row(LinConstraint::named(
                    LinExpr::term(energy[hop], 1.0),
                    Sense::Ge,
                    need + od.anxiety * od.e_max,
                    format!("anx[{tag}.{hop}]"),
                ));
            }

            // path cost: travel time + charging time + waiting + energy cost
            let mut cost_ub = 0.0;
            let cost = ir.new_var(
                format!("C[{tag}]"),
                0.0,
                f64::INFINITY,
                VarKind::Continuous,
            )?;
            let mut crow = LinExpr::term(cost, 1.0);
            for &ai in &p.arcs {
                crow.add_term(arc_t[&ai], -case.time_value);
                let arc = &case.arcs[ai];
                cost_ub += case.time_value
                    * bpr_time(arc.t0_min, arc.capacity, pwl.bpr_xmax_factor * arc.capacity);
            }
            for s in &stops {
                let n = case.node(s.node).unwrap();
                let cap = charge_cap(case, s.node, od.e_max);
                // charging time in minutes: 60 * E / pile
                crow.add_term(s.charge, -case.time_value * 60.0 / n.pile_kw);
                crow.add_term(s.wait_product, -case.time_value);
                crow.add_term(s.charge, -n.price_per_kwh);
                cost_ub += case.time_value
                    * (60.0 * cap / n.pile_kw
                        + n.wait_base_min * (1.0 + n.congestion_min_per_veh * total_demand))
                    + n.price_per_kwh * cap;
            }
            ir.push_row(LinConstraint::named(crow, Sense::Eq, 0.0, format!("cost[{tag}]")));
            ir.vars[cost.index()].upper = cost_ub;

            path_vars.push(PathVars {
                flow,
                used,
                cost,
                energy,
                stops,
                cost_upper: cost_ub,
            });
        }

        // flow conservation over the O-D's paths
        let mut conserve = LinExpr::zero();
        for pv in &path_vars {
            conserve.add_term(pv.flow, 1.0);
        }
        ir.push_row(LinConstraint::named(
            conserve,
            Sense::Eq,
            od.demand,
            format!("conserve[od{oi}]"),
        ));

        // equilibrium cost and per-path complementarity big-Ms
        let cost_ub_max = path_vars
            .iter()
            .map(|p| p.cost_upper)
            .fold(0.0f64, f64::max);
        let od_cost = ir.new_var(format!("Crs[od{oi}]"), 0.0, cost_ub_max, VarKind::Continuous)?;
        for (qi, pv) in path_vars.iter().enumerate() {
            // C_q >= C_rs
            let mut ge = LinExpr::term(pv.cost, 1.0);
            ge.add_term(od_cost, -1.0);
            ir.push_row(LinConstraint::named(
                ge,
                Sense::Ge,
                0.0,
                format!("ue_lo[od{oi}.q{qi}]"),
            ));
            // C_q - C_rs <= M (1 - nu)
            let m = 1.1 * pv.cost_upper;
            let mut le = LinExpr::term(pv.cost, 1.0);
            le.add_term(od_cost, -1.0);
            le.add_term(pv.used, m);
            ir.push_row(LinConstraint::named(
                le,
                Sense::Le,
                m,
                format!("ue_hi[od{oi}.q{qi}]"),
            ));
        }
        per_od.push(OdVars {
            cost: od_cost,
            paths: path_vars,
        });
    }

    // ---- arc flows are the path flows that traverse them -------------------
    for (&ai, x) in &arc_x {
        let mut row = LinExpr::term(*x, 1.0);
        for (pp, odv) in paths.per_od.iter().zip(&per_od) {
            for (p, pv) in pp.iter().zip(&odv.paths) {
                for &pa in &p.arcs {
                    if pa == ai {
                        row.add_term(pv.flow, -1.0);
                    }
                }
            }
        }
        let arc = &case.arcs[ai];
        ir.push_row(LinConstraint::named(
            row,
            Sense::Eq,
            0.0,
            format!("arcflow[{}-{}]", arc.from, arc.to),
        ));
    }

    // ---- station balances: queue flow and power ----------------------------
    let mut p_t = Vec::new();
    for &m in &stations {
        // x_m = sum of flow*charging products over stops at m
        let mut xrow = LinExpr::term(node_x[&m], 1.0);
        for odv in &per_od {
            for pv in &odv.paths {
                for s in &pv.stops {
                    if s.node == m {
                        xrow.add_term(s.flow_product, -1.0);
                    }
                }
            }
        }
        ir.push_row(LinConstraint::named(xrow, Sense::Eq, 0.0, format!("queue[{m}]")));

        // p_T[m] = sum of per-stop powers (each f*E within grid tolerance),
        // with the lower bound widened by the summed grid slack
        let mut slack = 0.0;
        for (od, odv) in case.od_pairs.iter().zip(&per_od) {
            for pv in &odv.paths {
                for s in &pv.stops {
                    if s.node == m {
                        let cap = charge_cap(case, m, od.e_max);
                        slack += coupling_pwl_tolerance(od.demand, cap, pwl.coupling_segments);
                    }
                }
            }
        }
        let pt = ir.new_var(
            format!("pT[{m}]"),
            -slack,
            case.evcs_p_max_kw,
            VarKind::Continuous,
        )?;
        let mut prow = LinExpr::term(pt, 1.0);
        for odv in &per_od {
            for pv in &odv.paths {
                for s in &pv.stops {
                    if s.node == m {
                        prow.add_term(s.power, -1.0);
                    }
                }
            }
        }
        ir.push_row(LinConstraint::named(prow, Sense::Eq, 0.0, format!("power[{m}]")));
        p_t.push((m, pt));
    }
    ir.boundary_vars
        .insert("p_T".into(), p_t.iter().map(|&(_, v)| v).collect());

    // ---- objective: total social cost sum(F * C_rs) ------------------------
    for (od, odv) in case.od_pairs.iter().zip(&per_od) {
        ir.obj_lin.add_term(odv.cost, od.demand);
    }
    ir.obj_lin.normalize();

    Ok((
        ir,
        TnVars {
            arc_x,
            arc_t,
            node_x,
            node_t,
            p_t,
            per_od,
        },
    ))
}

/// Piecewise-linearize one BPR curve: `x = sum(b_i w_i)`, `t = sum(t(b_i) w_i)`,
/// `sum(w) = 1`, `w` in SOS2. Returns the weight variables.
pub fn pwl_bpr(
    ir: &mut ProblemIR,
    tag: &str,
    t0: f64,
    capacity: f64,
    x_max: f64,
    segments: usize,
    x: VarId,
    t: VarId,
) -> Result<Vec<VarId>, TnError> {
    if segments < 1 {
        return Err(TnError::MissingBreakpoints(segments));
    }
    let bps = bpr_breakpoints(x_max, segments);
    let mut weights = Vec::with_capacity(bps.len());
    for (i, _) in bps.iter().enumerate() {
        weights.push(ir.new_var(format!("ybpr[{tag}.{i}]"), 0.0, 1.0, VarKind::Continuous)?);
    }
    let mut xr = LinExpr::term(x, 1.0);
    let mut tr = LinExpr::term(t, 1.0);
    let mut sum = LinExpr::zero();
    for (w, &b) in weights.iter().zip(&bps) {
        xr.add_term(*w, -b);
        tr.add_term(*w, -bpr_time(t0, capacity, b));
        sum.add_term(*w, 1.0);
    }
    ir.push_row(LinConstraint::named(xr, Sense::Eq, 0.0, format!("bprx[{tag}]")));
    ir.push_row(LinConstraint::named(tr, Sense::Eq, 0.0, format!("bprt[{tag}]")));
    ir.push_row(LinConstraint::named(sum, Sense::Eq, 1.0, format!("bprs[{tag}]")));
    ir.sos2.push(Sos2Set {
        members: weights.clone(),
        label: format!("bpr[{tag}]"),
    });
    Ok(weights)
}

/// Exact big-M envelope of `prod = cont * bin` for `cont` in `[lo, hi]`.
fn envelope_product(
    ir: &mut ProblemIR,
    prod: VarId,
    cont: VarId,
    bin: VarId,
    lo: f64,
    hi: f64,
    tag: &str,
) {
    let mut a = LinExpr::term(prod, 1.0);
    a.add_term(bin, -hi);
    ir.push_row(LinConstraint::named(a, Sense::Le, 0.0, format!("env_hi[{tag}]")));
    let mut b = LinExpr::term(prod, 1.0);
    b.add_term(bin, -lo);
    ir.push_row(LinConstraint::named(b, Sense::Ge, 0.0, format!("env_lo[{tag}]")));
    let mut c = LinExpr::term(prod, 1.0);
    c.add_term(cont, -1.0);
    c.add_term(bin, -lo);
    ir.push_row(LinConstraint::named(c, Sense::Le, -lo, format!("env_c1[{tag}]")));
    let mut d = LinExpr::term(prod, 1.0);
    d.add_term(cont, -1.0);
    d.add_term(bin, -hi);
    ir.push_row(LinConstraint::named(d, Sense::Ge, -hi, format!("env_c2[{tag}]")));
}

/// Difference-of-squares linearization of `flow * charge`:
/// `z1 = (f+E)/2`, `z2 = (f-E)/2`, each square on a uniform SOS2 grid.
/// The product is then `z1_sq - z2_sq`.
fn coupling_squares(
    ir: &mut ProblemIR,
    flow: VarId,
    charge: VarId,
    f_max: f64,
    e_max: f64,
    segments: usize,
    tag: &str,
) -> Result<(VarId, VarId, VarId, VarId), TnError> {
    let z1_lo = 0.0;
    let z1_hi = 0.5 * (f_max + e_max);
    let z2_lo = -0.5 * e_max;
    let z2_hi = 0.5 * f_max;
    let z1 = ir.new_var(format!("z1[{tag}]"), z1_lo, z1_hi, VarKind::Continuous)?;
    let z2 = ir.new_var(format!("z2[{tag}]"), z2_lo, z2_hi, VarKind::Continuous)?;
    let mut d1 = LinExpr::term(z1, 1.0);
    d1.add_term(flow, -0.5);
    d1.add_term(charge, -0.5);
    ir.push_row(LinConstraint::named(d1, Sense::Eq, 0.0, format!("z1def[{tag}]")));
    let mut d2 = LinExpr::term(z2, 1.0);
    d2.add_term(flow, -0.5);
    d2.add_term(charge, 0.5);
    ir.push_row(LinConstraint::named(d2, Sense::Eq, 0.0, format!("z2def[{tag}]")));
    let z1_sq = pwl_square(ir, z1, z1_lo, z1_hi, segments, &format!("{tag}.s1"))?;
    let z2_sq = pwl_square(ir, z2, z2_lo, z2_hi, segments, &format!("{tag}.s2"))?;
    Ok((z1, z2, z1_sq, z2_sq))
}

/// Square-grid breakpoints on `[lo, hi]`. Zero is always a breakpoint when
/// the range crosses it: the idle state (no flow, no charge) of every path
/// must be exactly representable or an unused stop would force a phantom
/// station power.
pub fn square_breakpoints(lo: f64, hi: f64, segments: usize) -> Vec<f64> {
    if lo >= 0.0 || hi <= 0.0 {
        return (0..=segments)
            .map(|i| lo + (hi - lo) * i as f64 / segments as f64)
            .collect();
    }
    let k = ((segments as f64 * -lo / (hi - lo)).round() as usize).clamp(1, segments - 1);
    let mut out = Vec::with_capacity(segments + 1);
    for i in 0..=k {
        out.push(lo - lo * i as f64 / k as f64);
    }
    for j in 1..=(segments - k) {
        out.push(hi * j as f64 / (segments - k) as f64);
    }
    out
}

/// SOS2 grid for `sq = z^2` on `[lo, hi]`.
fn pwl_square(
    ir: &mut ProblemIR,
    z: VarId,
    lo: f64,
    hi: f64,
    segments: usize,
    tag: &str,
) -> Result<VarId, TnError> {
    let sq_hi = (lo * lo).max(hi * hi);
    let sq = ir.new_var(format!("sq[{tag}]"), 0.0, sq_hi, VarKind::Continuous)?;
    let mut weights = Vec::with_capacity(segments + 1);
    for i in 0..=segments {
        weights.push(ir.new_var(format!("w[{tag}.{i}]"), 0.0, 1.0, VarKind::Continuous)?);
    }
    let mut zr = LinExpr::term(z, 1.0);
    let mut sr = LinExpr::term(sq, 1.0);
    let mut sum = LinExpr::zero();
    for (w, &b) in weights.iter().zip(square_breakpoints(lo, hi, segments).iter()) {
        zr.add_term(*w, -b);
        sr.add_term(*w, -b * b);
        sum.add_term(*w, 1.0);
    }
    ir.push_row(LinConstraint::named(zr, Sense::Eq, 0.0, format!("pwlz[{tag}]")));
    ir.push_row(LinConstraint::named(sr, Sense::Eq, 0.0, format!("pwls[{tag}]")));
    ir.push_row(LinConstraint::named(sum, Sense::Eq, 1.0, format!("pwl1[{tag}]")));
    ir.sos2.push(Sos2Set {
        members: weights,
        label: format!("sq[{tag}]"),
    });
    Ok(sq)
}

/// Augment the objective with `+lambda'p_T + (gamma/2)||p_T - z||^2`
/// (prices $/kWh, powers kW).
pub fn attach_augmented_objective_tn(
    ir: &ProblemIR,
    lambda: &[f64],
    z: &[f64],
    gamma: f64,
) -> Result<ProblemIR, TnError> {
    let group = ir
        .boundary_vars
        .get("p_T")
        .ok_or_else(|| TnError::BadData("IR has no p_T boundary group".into()))?
        .clone();
    if lambda.len() != group.len() || z.len() != group.len() {
        return Err(TnError::Dimension {
            expected: group.len(),
            got: lambda.len().max(z.len()),
        });
    }
    let mut out = ir.clone();
    for (i, &p) in group.iter().enumerate() {
        let lin = lambda[i] - gamma * z[i];
        if lin != 0.0 {
            out.obj_lin.add_term(p, lin);
        }
        if gamma != 0.0 {
            out.obj_quad.push(QuadObjTerm {
                var_a: p,
                var_b: p,
                coefficient: gamma / 2.0,
            });
            out.obj_lin.constant += gamma / 2.0 * z[i] * z[i];
        }
    }
    out.obj_lin.normalize();
    Ok(out)
}

/// Routing and charging report in engineering units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TnRouting {
    pub per_od: Vec<OdRouting>,
    /// (station node, power kW)
    pub station_kw: Vec<(u32, f64)>,
    pub objective: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OdRouting {
    pub origin: u32,
    pub dest: u32,
    pub equilibrium_cost: f64,
    pub paths: Vec<PathRouting>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathRouting {
    pub nodes: Vec<u32>,
    pub flow: f64,
    pub used: bool,
    pub cost: f64,
    pub stops: Vec<ChargeStop>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChargeStop {
    pub node: u32,
    pub charging: bool,
    /// Energy charged per vehicle, kWh.
    pub kwh: f64,
}

pub fn extract_routing(
    sol: &Solution,
    case: &TnCase,
    paths: &PathSet,
    vars: &TnVars,
) -> TnRouting {
    let x = &sol.values;
    let mut per_od = Vec::new();
    for ((od, pp), odv) in case.od_pairs.iter().zip(&paths.per_od).zip(&vars.per_od) {
        let mut out_paths = Vec::new();
        for (p, pv) in pp.iter().zip(&odv.paths) {
            out_paths.push(PathRouting {
                nodes: p.nodes.clone(),
                flow: x[pv.flow.index()],
                used: x[pv.used.index()] > 0.5,
                cost: x[pv.cost.index()],
                stops: pv
                    .stops
                    .iter()
                    .map(|s| ChargeStop {
                        node: s.node,
                        charging: x[s.charging.index()] > 0.5,
                        kwh: x[s.charge.index()],
                    })
                    .collect(),
            });
        }
        per_od.push(OdRouting {
            origin: od.origin,
            dest: od.dest,
            equilibrium_cost: x[odv.cost.index()],
            paths: out_paths,
        });
    }
    TnRouting {
        per_od,
        station_kw: vars
            .p_t
            .iter()
            .map(|&(m, v)| (m, x[v.index()]))
            .collect(),
        objective: sol.objective,
    }
}
