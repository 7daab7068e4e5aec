use opt_ir::{
    LinConstraint, LinExpr, ProblemIR, QuadObjTerm, RotatedConeConstraint, Sense, Solution,
    VarId, VarKind,
};
use serde::{Deserialize, Serialize};

use crate::{PdnCase, PdnError, KW_PER_PU};

/// Variable handles of one feeder inside a (possibly multi-feeder) IR.
#[derive(Debug, Clone)]
pub struct PdnVars {
    /// Parallel to `case.lines`: active flow, reactive flow, squared current.
    pub line_p: Vec<VarId>,
    pub line_q: Vec<VarId>,
    pub line_ell: Vec<VarId>,
    /// Parallel to `case.nodes`: squared voltage.
    pub node_v: Vec<VarId>,
    pub grid_p: VarId,
    pub grid_q: VarId,
    pub evcs: Vec<EvcsVars>,
}

#[derive(Debug, Clone)]
pub struct EvcsVars {
    pub node: usize,
    /// EVCS active demand, kW (boundary variable).
    pub p_d_kw: VarId,
    /// EVCS reactive demand, pu.
    pub q_d: VarId,
}

/// Build the single-feeder DistFlow subproblem. The EVCS demands form the
/// boundary group `"p_D"` in node order.
pub fn build_pdn_ir(case: &PdnCase) -> Result<(ProblemIR, PdnVars), PdnError> {
    let mut ir = ProblemIR::new();
    let vars = push_feeder(&mut ir, case)?;
    ir.boundary_vars.insert(
        "p_D".into(),
        vars.evcs.iter().map(|e| e.p_d_kw).collect(),
    );
    Ok((ir, vars))
}

/// Build one IR spanning several independent feeders (the PO subproblem of a
/// multi-feeder operator). The boundary group concatenates feeders in order.
pub fn build_pdn_multi(cases: &[PdnCase]) -> Result<(ProblemIR, Vec<PdnVars>), PdnError> {
    let mut ir = ProblemIR::new();
    let mut all = Vec::new();
    let mut boundary = Vec::new();
    for case in cases {
        let vars = push_feeder(&mut ir, case)?;
        boundary.extend(vars.evcs.iter().map(|e| e.p_d_kw));
        all.push(vars);
    }
    ir.boundary_vars.insert("p_D".into(), boundary);
    Ok((ir, all))
}

fn push_feeder(ir: &mut ProblemIR, case: &PdnCase) -> Result<PdnVars, PdnError> {
    let parents = case.validate()?;
    let fd = &case.name;
    let grid = case.node_index(&case.grid_node).unwrap();

    let mut node_v = Vec::with_capacity(case.nodes.len());
    for n in &case.nodes {
        let (lo, hi) = if n.id == case.grid_node {
            (case.v_root, case.v_root) // slack bus setpoint
        } else {
            (n.v_min, n.v_max)
        };
        node_v.push(ir.new_var(format!("{fd}.v[{}]", n.id), lo, hi, VarKind::Continuous)?);
    }
    let mut line_p = Vec::with_capacity(case.lines.len());
    let mut line_q = Vec::with_capacity(case.lines.len());
    let mut line_ell = Vec::with_capacity(case.lines.len());
    for l in &case.lines {
        let tag = format!("{}-{}", l.from, l.to);
        line_p.push(ir.new_var(
            format!("{fd}.p[{tag}]"),
            -l.s_max,
            l.s_max,
            VarKind::Continuous,
        )?);
        line_q.push(ir.new_var(
            format!("{fd}.q[{tag}]"),
            -l.s_max,
            l.s_max,
            VarKind::Continuous,
        )?);
        line_ell.push(ir.new_var(
            format!("{fd}.ell[{tag}]"),
            0.0,
            l.ell_max,
            VarKind::Continuous,
        )?);
    }
    let grid_p = ir.new_var(
        format!("{fd}.p_grid"),
        0.0,
        f64::INFINITY,
        VarKind::Continuous,
    )?;
    let grid_q = ir.new_var(
        format!("{fd}.q_grid"),
        f64::NEG_INFINITY,
        f64::INFINITY,
        VarKind::Continuous,
    )?;
    let tan_theta = case.evcs_pf_angle.tan();
    let mut evcs = Vec::new();
    for ni in case.evcs_nodes() {
        let id = &case.nodes[ni].id;
        let p_d_kw = ir.new_var(
            format!("{fd}.p_evcs[{id}]"),
            0.0,
            case.evcs_p_max_kw,
            VarKind::Continuous,
        )?;
        let q_d = ir.new_var(
            format!("{fd}.q_evcs[{id}]"),
            f64::NEG_INFINITY,
            f64::INFINITY,
            VarKind::Continuous,
        )?;
        // reactive demand tied to active via the power-factor angle
        let mut e = LinExpr::term(q_d, 1.0);
        e.add_term(p_d_kw, -tan_theta / KW_PER_PU);
        ir.push_row(LinConstraint::named(
            e,
            Sense::Eq,
            0.0,
            format!("{fd}.pf[{id}]"),
        ));
        evcs.push(EvcsVars {
            node: ni,
            p_d_kw,
            q_d,
        });
    }

    // voltage drop along each line
    for (li, l) in case.lines.iter().enumerate() {
        let from = case.node_index(&l.from).unwrap();
        let to = case.node_index(&l.to).unwrap();
        let mut e = LinExpr::term(node_v[from], 1.0);
        e.add_term(node_v[to], -1.0);
        e.add_term(line_p[li], -2.0 * l.r);
        e.add_term(line_q[li], -2.0 * l.x);
        e.add_term(line_ell[li], l.r * l.r + l.x * l.x);
        ir.push_row(LinConstraint::named(
            e,
            Sense::Eq,
            0.0,
            format!("{fd}.vdrop[{}-{}]", l.from, l.to),
        ));
    }

    // nodal balances: inflow after losses plus local net injection = outflow
    for (ni, n) in case.nodes.iter().enumerate() {
        let mut p = LinExpr::zero();
        let mut q = LinExpr::zero();
        if ni == grid {
            p.add_term(grid_p, 1.0);
            q.add_term(grid_q, 1.0);
        }
        if let Some(ev) = evcs.iter().find(|e| e.node == ni) {
            p.add_term(ev.p_d_kw, -1.0 / KW_PER_PU);
            q.add_term(ev.q_d, -1.0);
        }
        if let Some(pl) = parents[ni] {
            let l = &case.lines[pl];
            p.add_term(line_p[pl], 1.0);
            p.add_term(line_ell[pl], -l.r);
            q.add_term(line_q[pl], 1.0);
            q.add_term(line_ell[pl], -l.x);
        }
        for (li, l) in case.lines.iter().enumerate() {
            if case.node_index(&l.from).unwrap() == ni {
                p.add_term(line_p[li], -1.0);
                q.add_term(line_q[li], -1.0);
            }
        }
        ir.push_row(LinConstraint::named(
            p,
            Sense::Eq,
            n.p_load - n.pv_p,
            format!("{fd}.pbal[{}]", n.id),
        ));
        ir.push_row(LinConstraint::named(
            q,
            Sense::Eq,
            n.q_load,
            format!("{fd}.qbal[{}]", n.id),
        ));
    }

    // branch-flow convex hull and apparent-power cones
    for (li, l) in case.lines.iter().enumerate() {
        let from = case.node_index(&l.from).unwrap();
        let n = &case.nodes[from];
        let (v_lo, v_hi) = if from == grid {
            (case.v_root, case.v_root)
        } else {
            (n.v_min, n.v_max)
        };
        ir.cones.push(RotatedConeConstraint {
            x_terms: vec![line_p[li], line_q[li]],
            u: LinExpr::term(node_v[from], 1.0),
            v: LinExpr::term(line_ell[li], 1.0),
            name: format!("{fd}.flow[{}-{}]", l.from, l.to),
        });
        ir.cones.push(RotatedConeConstraint {
            x_terms: vec![line_p[li], line_q[li]],
            u: LinExpr::constant(l.s_max),
            v: LinExpr::constant(l.s_max),
            name: format!("{fd}.smax[{}-{}]", l.from, l.to),
        });
        // secant of v*l = s_max^2 between the voltage bounds
        let s2 = l.s_max * l.s_max;
        let mut e = LinExpr::term(node_v[from], s2);
        e.add_term(line_ell[li], v_lo * v_hi);
        ir.push_row(LinConstraint::named(
            e,
            Sense::Le,
            s2 * (v_lo + v_hi),
            format!("{fd}.hull[{}-{}]", l.from, l.to),
        ));
    }

    // cost of grid purchases ($/MWh * pu(MW) = $/h)
    ir.obj_lin.add_term(grid_p, case.grid_price);

    Ok(PdnVars {
        line_p,
        line_q,
        line_ell,
        node_v,
        grid_p,
        grid_q,
        evcs,
    })
}

/// Augment the objective with the dual and penalty terms
/// `-lambda'p_D + (gamma/2)||z - p_D||^2` (prices $/kWh, powers kW).
pub fn attach_augmented_objective_pdn(
    ir: &ProblemIR,
    lambda: &[f64],
    z: &[f64],
    gamma: f64,
) -> Result<ProblemIR, PdnError> {
    let group = ir
        .boundary_vars
        .get("p_D")
        .ok_or_else(|| PdnError::BadData("IR has no p_D boundary group".into()))?
        .clone();
    if lambda.len() != group.len() || z.len() != group.len() {
        return Err(PdnError::Dimension {
            expected: group.len(),
            got: lambda.len().max(z.len()),
        });
    }
    let mut out = ir.clone();
    for (i, &p) in group.iter().enumerate() {
        let lin = -lambda[i] - gamma * z[i];
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

/// Feeder dispatch in engineering units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdnDispatch {
    pub feeder: String,
    pub grid_p_mw: f64,
    pub grid_q_mvar: f64,
    /// (node id, voltage magnitude pu)
    pub voltages: Vec<(String, f64)>,
    /// (line tag, p MW, q MVAr, current^2 pu^2)
    pub flows: Vec<(String, f64, f64, f64)>,
    /// (node id, EVCS demand MW)
    pub evcs_mw: Vec<(String, f64)>,
    pub losses_mw: f64,
    pub objective: f64,
}

pub fn extract_dispatch(sol: &Solution, case: &PdnCase, vars: &PdnVars) -> PdnDispatch {
    let x = &sol.values;
    let mut losses = 0.0;
    let mut flows = Vec::new();
    for (li, l) in case.lines.iter().enumerate() {
        let ell = x[vars.line_ell[li].index()];
        losses += l.r * ell;
        flows.push((
            format!("{}-{}", l.from, l.to),
            x[vars.line_p[li].index()],
            x[vars.line_q[li].index()],
            ell,
        ));
    }
    PdnDispatch {
        feeder: case.name.clone(),
        grid_p_mw: x[vars.grid_p.index()],
        grid_q_mvar: x[vars.grid_q.index()],
        voltages: case
            .nodes
            .iter()
            .zip(&vars.node_v)
            .map(|(n, &v)| (n.id.clone(), x[v.index()].max(0.0).sqrt()))
            .collect(),
        flows,
        evcs_mw: vars
            .evcs
            .iter()
            .map(|e| {
                (
                    case.nodes[e.node].id.clone(),
                    x[e.p_d_kw.index()] / KW_PER_PU,
                )
            })
            .collect(),
        losses_mw: losses,
        objective: case.grid_price * x[vars.grid_p.index()],
    }
}
