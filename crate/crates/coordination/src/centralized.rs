use opt_ir::{LinConstraint, LinExpr, ProblemIR, Sense};

use crate::CoordError;

/// Merge the two subproblems into one monolithic program with the consensus
/// constraint explicit: `p_D[i] = p_T[i]` elementwise. The result is a
/// linear-objective MICP suitable for `solve_micp_linear`, used as the
/// centralized cross-check of the decentralized runs.
pub fn build_centralized(pdn_ir: &ProblemIR, tn_ir: &ProblemIR) -> Result<ProblemIR, CoordError> {
    let mut ir = pdn_ir.clone();
    ir.merge(tn_ir, "tn.");
    let p_d = ir
        .boundary_vars
        .get("p_D")
        .cloned()
        .ok_or_else(|| CoordError::BadParams("PDN IR lacks p_D".into()))?;
    let p_t = ir
        .boundary_vars
        .get("tn.p_T")
        .cloned()
        .ok_or_else(|| CoordError::BadParams("TN IR lacks p_T".into()))?;
    if p_d.len() != p_t.len() {
        return Err(CoordError::BoundaryMismatch {
            pdn: p_d.len(),
            tn: p_t.len(),
        });
    }
    for (i, (&d, &t)) in p_d.iter().zip(&p_t).enumerate() {
        let mut e = LinExpr::term(d, 1.0);
        e.add_term(t, -1.0);
        ir.push_row(LinConstraint::named(e, Sense::Eq, 0.0, format!("consensus[{i}]")));
    }
    Ok(ir)
}
