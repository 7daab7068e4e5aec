use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::expr::{LinConstraint, LinExpr};
use crate::solution::Solution;
use crate::{IrError, SOS2_ZERO_TOL, TOL_CONE_REL, TOL_FEAS};

/// Dense variable handle, unique within one [`ProblemIR`].
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    #[serde(rename = "continuous")]
    Continuous,
    #[serde(rename = "binary")]
    Binary,
}

/// Variable declaration: bounds may be infinite for continuous variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarSpec {
    pub id: VarId,
    #[serde(with = "bound_serde")]
    pub lower: f64,
    #[serde(with = "bound_serde")]
    pub upper: f64,
    pub kind: VarKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
}

/// JSON has no infinity literal; bounds serialize as numbers or the strings
/// "inf" / "-inf".
mod bound_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("bad bound {other:?}"))),
            },
        }
    }
}

/// `sum(x_i^2) <= u * v`, with `u >= 0`, `v >= 0` enforced by accompanying
/// linear bounds in the surrounding model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotatedConeConstraint {
    pub x_terms: Vec<VarId>,
    pub u: LinExpr,
    pub v: LinExpr,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
}

impl RotatedConeConstraint {
    /// `||x||^2 - u*v`, positive when violated.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let ss: f64 = self.x_terms.iter().map(|v| x[v.index()].powi(2)).sum();
        ss - self.u.value(x) * self.v.value(x)
    }

    /// Violation scaled by `max(1, ||x||^2)`.
    pub fn relative_violation(&self, x: &[f64]) -> f64 {
        let ss: f64 = self.x_terms.iter().map(|v| x[v.index()].powi(2)).sum();
        (ss - self.u.value(x) * self.v.value(x)) / ss.max(1.0)
    }
}

/// Ordered variable set in which at most two adjacent members may be nonzero
/// at an integer-feasible point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sos2Set {
    pub members: Vec<VarId>,
    pub label: String,
}

impl Sos2Set {
    /// True when at most two members are nonzero and any two nonzeros are adjacent.
    pub fn adjacency_ok(&self, x: &[f64], tol: f64) -> bool {
        let nz: Vec<usize> = self
            .members
            .iter()
            .enumerate()
            .filter(|(_, v)| x[v.index()].abs() > tol)
            .map(|(i, _)| i)
            .collect();
        match nz.as_slice() {
            [] | [_] => true,
            [a, b] => b - a == 1,
            _ => false,
        }
    }
}

/// Diagonal or cross quadratic objective term `coeff * var_a * var_b`.
/// Builders only ever emit squared residuals (`var_a == var_b`, `coeff > 0`),
/// which keeps the quadratic part positive semidefinite by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadObjTerm {
    pub var_a: VarId,
    pub var_b: VarId,
    pub coefficient: f64,
}

/// A mixed-integer convex program: variables, linear rows, rotated cones,
/// SOS2 sets, linear + diagonal quadratic objective, named boundary groups.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemIR {
    pub vars: Vec<VarSpec>,
    pub lin: Vec<LinConstraint>,
    pub cones: Vec<RotatedConeConstraint>,
    pub sos2: Vec<Sos2Set>,
    pub obj_lin: LinExpr,
    pub obj_quad: Vec<QuadObjTerm>,
    /// Named boundary-variable groups, e.g. "p_D" or "p_T".
    pub boundary_vars: BTreeMap<String, Vec<VarId>>,
}

/// Validation finding. Diagnostics never abort; an empty list means the IR
/// satisfies all structural invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub message: String,
}

impl Diagnostic {
    fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

/// Discrete-structure fixing: binary values plus an adjacency window per SOS2
/// set. Applying a plan makes an IR purely continuous.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FixPlan {
    pub binaries: BTreeMap<VarId, u8>,
    /// label -> start index w: members outside {w, w+1} are clamped to zero.
    pub sos2_windows: BTreeMap<String, usize>,
}

impl ProblemIR {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Register a variable; ids are dense in insertion order.
    pub fn add_var(&mut self, mut spec: VarSpec) -> Result<VarId, IrError> {
        if spec.lower.is_nan() || spec.upper.is_nan() {
            return Err(IrError::NonFinite(format!("variable {:?}", spec.name)));
        }
        if spec.lower > spec.upper {
            return Err(IrError::InvertedBounds {
                name: spec.name.clone(),
                lower: spec.lower,
                upper: spec.upper,
            });
        }
        if spec.kind == VarKind::Binary && (spec.lower < 0.0 || spec.upper > 1.0) {
            return Err(IrError::BinaryBounds {
                name: spec.name.clone(),
                lower: spec.lower,
                upper: spec.upper,
            });
        }
        let id = VarId(self.vars.len() as u32);
        spec.id = id;
        self.vars.push(spec);
        Ok(id)
    }

    /// Convenience wrapper building the [`VarSpec`] inline.
    pub fn new_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> Result<VarId, IrError> {
        self.add_var(VarSpec {
            id: VarId(0),
            lower,
            upper,
            kind,
            name: name.into(),
        })
    }

    pub fn binary_vars(&self) -> Vec<VarId> {
        self.vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.id)
            .collect()
    }

    pub fn has_discrete(&self) -> bool {
        !self.sos2.is_empty() || self.vars.iter().any(|v| v.kind == VarKind::Binary)
    }

    /// Copy with the given binaries clamped to their assigned value and
    /// re-kinded continuous. The assignment must cover exactly the binary set.
    pub fn fix_binaries(&self, assignment: &BTreeMap<VarId, f64>) -> Result<Self, IrError> {
        for (&id, &val) in assignment {
            let spec = self
                .vars
                .get(id.index())
                .ok_or(IrError::UnknownVar(id.0))?;
            if spec.kind != VarKind::Binary {
                return Err(IrError::FixOnContinuous(spec.name.clone()));
            }
            if val != 0.0 && val != 1.0 {
                return Err(IrError::FixNonBinaryValue(spec.name.clone(), val));
            }
        }
        for spec in &self.vars {
            if spec.kind == VarKind::Binary && !assignment.contains_key(&spec.id) {
                return Err(IrError::FixMissingBinary(spec.name.clone()));
            }
        }
        let mut out = self.clone();
        for (&id, &val) in assignment {
            let spec = &mut out.vars[id.index()];
            spec.lower = val;
            spec.upper = val;
            spec.kind = VarKind::Continuous;
        }
        Ok(out)
    }

    /// Copy with each listed SOS2 set restricted to the adjacent pair starting
    /// at the given window index (members outside the pair get bounds [0,0]).
    pub fn fix_sos2_windows(
        &self,
        windows: &BTreeMap<String, usize>,
    ) -> Result<Self, IrError> {
        let mut out = self.clone();
        for (label, &start) in windows {
            let set = out
                .sos2
                .iter()
                .find(|s| &s.label == label)
                .cloned()
                .ok_or_else(|| IrError::UnknownSos2(label.clone()))?;
            if start + 2 > set.members.len() {
                return Err(IrError::Sos2WindowOutOfRange {
                    label: label.clone(),
                    start,
                    size: set.members.len(),
                });
            }
            for (i, &m) in set.members.iter().enumerate() {
                if i != start && i != start + 1 {
                    let spec = &mut out.vars[m.index()];
                    spec.lower = 0.0;
                    spec.upper = 0.0;
                }
            }
        }
        Ok(out)
    }

    /// Apply a full fixing plan (binaries + SOS2 windows).
    pub fn apply_fix_plan(&self, plan: &FixPlan) -> Result<Self, IrError> {
        let assignment: BTreeMap<VarId, f64> = plan
            .binaries
            .iter()
            .map(|(&v, &b)| (v, b as f64))
            .collect();
        self.fix_binaries(&assignment)?
            .fix_sos2_windows(&plan.sos2_windows)
    }

    /// Extract a fix plan from a solution of this IR: rounded binaries plus,
    /// per SOS2 set, the adjacent window with the largest weight mass.
    pub fn fix_plan_from(&self, values: &[f64]) -> FixPlan {
        let mut plan = FixPlan::default();
        for spec in &self.vars {
            if spec.kind == VarKind::Binary {
                let v = values[spec.id.index()];
                plan.binaries.insert(spec.id, if v >= 0.5 { 1 } else { 0 });
            }
        }
        for set in &self.sos2 {
            let n = set.members.len();
            let mut best = (0usize, f64::NEG_INFINITY);
            for w in 0..n.saturating_sub(1) {
                let mass = values[set.members[w].index()].abs()
                    + values[set.members[w + 1].index()].abs();
                if mass > best.1 {
                    best = (w, mass);
                }
            }
            plan.sos2_windows.insert(set.label.clone(), best.0);
        }
        plan
    }

    /// Structural validation; empty result means all invariants hold.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let n = self.vars.len() as u32;
        let check_var = |id: VarId, ctx: &str, out: &mut Vec<Diagnostic>| {
            if id.0 >= n {
                out.push(Diagnostic::new(format!(
                    "{ctx} references unknown variable id {}",
                    id.0
                )));
            }
        };
        for (i, spec) in self.vars.iter().enumerate() {
            if spec.id.index() != i {
                out.push(Diagnostic::new(format!(
                    "variable {:?} has id {} but sits at index {i}",
                    spec.name, spec.id.0
                )));
            }
            if spec.lower > spec.upper {
                out.push(Diagnostic::new(format!(
                    "variable {:?} has inverted bounds [{}, {}]",
                    spec.name, spec.lower, spec.upper
                )));
            }
            if spec.kind == VarKind::Binary && (spec.lower < 0.0 || spec.upper > 1.0) {
                out.push(Diagnostic::new(format!(
                    "binary variable {:?} has bounds outside [0,1]",
                    spec.name
                )));
            }
        }
        for (i, row) in self.lin.iter().enumerate() {
            if !row.expr.is_finite() || !row.rhs.is_finite() {
                out.push(Diagnostic::new(format!(
                    "linear row {i} ({:?}) has non-finite data",
                    row.name
                )));
            }
            for &(v, _) in &row.expr.terms {
                check_var(v, &format!("linear row {i}"), &mut out);
            }
        }
        for (i, cone) in self.cones.iter().enumerate() {
            for &v in &cone.x_terms {
                check_var(v, &format!("cone {i}"), &mut out);
            }
            for &(v, _) in cone.u.terms.iter().chain(cone.v.terms.iter()) {
                check_var(v, &format!("cone {i}"), &mut out);
            }
        }
        for set in &self.sos2 {
            if set.members.len() < 2 {
                out.push(Diagnostic::new(format!(
                    "SOS2 set {:?} has fewer than 2 members",
                    set.label
                )));
            }
            for &v in &set.members {
                check_var(v, &format!("SOS2 set {:?}", set.label), &mut out);
            }
        }
        for q in &self.obj_quad {
            check_var(q.var_a, "quadratic objective", &mut out);
            check_var(q.var_b, "quadratic objective", &mut out);
            if q.var_a == q.var_b && q.coefficient < 0.0 {
                out.push(Diagnostic::new(format!(
                    "negative diagonal quadratic coefficient on variable {}",
                    q.var_a.0
                )));
            }
        }
        for &(v, _) in &self.obj_lin.terms {
            check_var(v, "linear objective", &mut out);
        }
        for (label, group) in &self.boundary_vars {
            for &v in group {
                check_var(v, &format!("boundary group {label:?}"), &mut out);
            }
        }
        out
    }

    /// Objective value (linear + quadratic) at `x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let mut acc = self.obj_lin.value(x);
        for q in &self.obj_quad {
            acc += q.coefficient * x[q.var_a.index()] * x[q.var_b.index()];
        }
        acc
    }

    /// Check a claimed-optimal solution against every constraint class.
    /// Returns human-readable violations (empty = feasible within tolerance).
    pub fn check_solution(&self, sol: &Solution) -> Vec<String> {
        let x = &sol.values;
        let mut out = Vec::new();
        if x.len() != self.vars.len() {
            out.push(format!(
                "value vector has length {}, expected {}",
                x.len(),
                self.vars.len()
            ));
            return out;
        }
        for spec in &self.vars {
            let v = x[spec.id.index()];
            if v < spec.lower - TOL_FEAS || v > spec.upper + TOL_FEAS {
                out.push(format!(
                    "variable {:?} = {v} outside [{}, {}]",
                    spec.name, spec.lower, spec.upper
                ));
            }
        }
        for row in &self.lin {
            let viol = row.violation(x);
            if viol > TOL_FEAS {
                out.push(format!("row {:?} violated by {viol:.3e}", row.name));
            }
        }
        for cone in &self.cones {
            let viol = cone.relative_violation(x);
            if viol > TOL_CONE_REL {
                out.push(format!("cone {:?} violated by {viol:.3e}", cone.name));
            }
        }
        for set in &self.sos2 {
            if !set.adjacency_ok(x, SOS2_ZERO_TOL) {
                out.push(format!("SOS2 set {:?} adjacency violated", set.label));
            }
        }
        out
    }

    /// Absorb `other` into `self`, remapping its variable ids. Returns the
    /// id offset: `other`'s VarId(k) becomes VarId(k + offset) here.
    /// Boundary groups are merged under `prefix`-qualified labels.
    pub fn merge(&mut self, other: &ProblemIR, prefix: &str) -> u32 {
        let offset = self.vars.len() as u32;
        let remap = |v: VarId| VarId(v.0 + offset);
        let remap_expr = |e: &LinExpr| LinExpr {
            terms: e.terms.iter().map(|&(v, c)| (remap(v), c)).collect(),
            constant: e.constant,
        };
        for spec in &other.vars {
            self.vars.push(VarSpec {
                id: remap(spec.id),
                name: format!("{prefix}{}", spec.name),
                ..spec.clone()
            });
        }
        for row in &other.lin {
            self.lin.push(LinConstraint {
                expr: remap_expr(&row.expr),
                sense: row.sense,
                rhs: row.rhs,
                name: format!("{prefix}{}", row.name),
            });
        }
        for cone in &other.cones {
            self.cones.push(RotatedConeConstraint {
                x_terms: cone.x_terms.iter().map(|&v| remap(v)).collect(),
                u: remap_expr(&cone.u),
                v: remap_expr(&cone.v),
                name: format!("{prefix}{}", cone.name),
            });
        }
        for set in &other.sos2 {
            self.sos2.push(Sos2Set {
                members: set.members.iter().map(|&v| remap(v)).collect(),
                label: format!("{prefix}{}", set.label),
            });
        }
        let extra = remap_expr(&other.obj_lin);
        self.obj_lin.terms.extend(extra.terms);
        self.obj_lin.constant += extra.constant;
        for q in &other.obj_quad {
            self.obj_quad.push(QuadObjTerm {
                var_a: remap(q.var_a),
                var_b: remap(q.var_b),
                coefficient: q.coefficient,
            });
        }
        for (label, group) in &other.boundary_vars {
            self.boundary_vars.insert(
                format!("{prefix}{label}"),
                group.iter().map(|&v| remap(v)).collect(),
            );
        }
        offset
    }

    pub fn push_row(&mut self, row: LinConstraint) {
        self.lin.push(row);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ProblemIR serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sense;

    fn var(ir: &mut ProblemIR, name: &str, lo: f64, hi: f64, kind: VarKind) -> VarId {
        ir.new_var(name, lo, hi, kind).unwrap()
    }

    #[test]
    fn dense_ids_start_at_zero() {
        let mut ir = ProblemIR::new();
        let a = var(&mut ir, "a", 0.0, 1.0, VarKind::Continuous);
        let b = var(&mut ir, "b", 0.0, 1.0, VarKind::Binary);
        assert_eq!(a, VarId(0));
        assert_eq!(b, VarId(1));
    }

    #[test]
    fn binary_bounds_accepted_inverted_rejected() {
        let mut ir = ProblemIR::new();
        assert!(ir.new_var("b", 0.0, 1.0, VarKind::Binary).is_ok());
        assert!(matches!(
            ir.new_var("bad", 1.0, 0.0, VarKind::Continuous),
            Err(IrError::InvertedBounds { .. })
        ));
    }

    #[test]
    fn fix_binaries_clamps_and_rekinds() {
        let mut ir = ProblemIR::new();
        let a1 = var(&mut ir, "alpha1", 0.0, 1.0, VarKind::Binary);
        let a2 = var(&mut ir, "alpha2", 0.0, 1.0, VarKind::Binary);
        let mut asg = BTreeMap::new();
        asg.insert(a1, 1.0);
        asg.insert(a2, 0.0);
        let fixed = ir.fix_binaries(&asg).unwrap();
        assert_eq!(fixed.vars[0].lower, 1.0);
        assert_eq!(fixed.vars[0].upper, 1.0);
        assert_eq!(fixed.vars[1].lower, 0.0);
        assert_eq!(fixed.vars[1].upper, 0.0);
        assert_eq!(fixed.vars[0].kind, VarKind::Continuous);
        // idempotent for the same assignment
        let again = fixed.fix_binaries(&BTreeMap::new()).unwrap();
        assert_eq!(again, fixed);
    }

    #[test]
    fn fix_binaries_empty_identity() {
        let mut ir = ProblemIR::new();
        var(&mut ir, "x", 0.0, 5.0, VarKind::Continuous);
        let fixed = ir.fix_binaries(&BTreeMap::new()).unwrap();
        assert_eq!(fixed, ir);
    }

    #[test]
    fn fix_binaries_on_continuous_rejected() {
        let mut ir = ProblemIR::new();
        let x = var(&mut ir, "x", 0.0, 5.0, VarKind::Continuous);
        let mut asg = BTreeMap::new();
        asg.insert(x, 1.0);
        assert!(matches!(
            ir.fix_binaries(&asg),
            Err(IrError::FixOnContinuous(_))
        ));
    }

    #[test]
    fn fix_binaries_missing_rejected() {
        let mut ir = ProblemIR::new();
        var(&mut ir, "b", 0.0, 1.0, VarKind::Binary);
        assert!(matches!(
            ir.fix_binaries(&BTreeMap::new()),
            Err(IrError::FixMissingBinary(_))
        ));
    }

    #[test]
    fn validate_unknown_var_in_cone() {
        let mut ir = ProblemIR::new();
        var(&mut ir, "x", 0.0, 1.0, VarKind::Continuous);
        ir.cones.push(RotatedConeConstraint {
            x_terms: vec![VarId(7)],
            u: LinExpr::constant(1.0),
            v: LinExpr::constant(1.0),
            name: "bad".into(),
        });
        assert_eq!(ir.validate().len(), 1);
    }

    #[test]
    fn validate_small_sos2() {
        let mut ir = ProblemIR::new();
        let y = var(&mut ir, "y", 0.0, 1.0, VarKind::Continuous);
        ir.sos2.push(Sos2Set {
            members: vec![y],
            label: "tiny".into(),
        });
        assert_eq!(ir.validate().len(), 1);
    }

    #[test]
    fn validate_clean_ir() {
        let mut ir = ProblemIR::new();
        let x = var(&mut ir, "x", 0.0, 2.0, VarKind::Continuous);
        ir.push_row(LinConstraint::new(LinExpr::term(x, 1.0), Sense::Le, 1.5));
        ir.obj_lin = LinExpr::term(x, -1.0);
        assert!(ir.validate().is_empty());
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let mut ir = ProblemIR::new();
        let x = var(&mut ir, "x", 0.0, 2.0, VarKind::Continuous);
        let b = var(&mut ir, "b", 0.0, 1.0, VarKind::Binary);
        ir.push_row(LinConstraint::named(
            LinExpr {
                terms: vec![(x, 1.0), (b, -3.5)],
                constant: 0.25,
            },
            Sense::Ge,
            -1.0,
            "row0",
        ));
        ir.cones.push(RotatedConeConstraint {
            x_terms: vec![x],
            u: LinExpr::term(b, 2.0),
            v: LinExpr::constant(4.0),
            name: "cone0".into(),
        });
        ir.sos2.push(Sos2Set {
            members: vec![x, b],
            label: "s".into(),
        });
        ir.obj_lin = LinExpr::term(x, 1.25);
        ir.obj_quad.push(QuadObjTerm {
            var_a: x,
            var_b: x,
            coefficient: 0.5,
        });
        ir.boundary_vars.insert("p_D".into(), vec![x]);
        let rt = ProblemIR::from_json(&ir.to_json()).unwrap();
        assert_eq!(rt, ir);
    }

    #[test]
    fn sos2_window_fixing() {
        let mut ir = ProblemIR::new();
        let ys: Vec<VarId> = (0..4)
            .map(|i| var(&mut ir, &format!("y{i}"), 0.0, 1.0, VarKind::Continuous))
            .collect();
        ir.sos2.push(Sos2Set {
            members: ys.clone(),
            label: "s".into(),
        });
        let mut w = BTreeMap::new();
        w.insert("s".to_string(), 1usize);
        let fixed = ir.fix_sos2_windows(&w).unwrap();
        assert_eq!(fixed.vars[ys[0].index()].upper, 0.0);
        assert_eq!(fixed.vars[ys[1].index()].upper, 1.0);
        assert_eq!(fixed.vars[ys[2].index()].upper, 1.0);
        assert_eq!(fixed.vars[ys[3].index()].upper, 0.0);
        // out of range window
        let mut bad = BTreeMap::new();
        bad.insert("s".to_string(), 3usize);
        assert!(ir.fix_sos2_windows(&bad).is_err());
    }

    #[test]
    fn merge_remaps_everything() {
        let mut a = ProblemIR::new();
        let xa = var(&mut a, "x", 0.0, 1.0, VarKind::Continuous);
        a.obj_lin = LinExpr::term(xa, 1.0);
        a.boundary_vars.insert("p_D".into(), vec![xa]);

        let mut b = ProblemIR::new();
        let xb = var(&mut b, "x", 0.0, 2.0, VarKind::Continuous);
        b.obj_lin = LinExpr::term(xb, 2.0);
        b.boundary_vars.insert("p_T".into(), vec![xb]);

        let off = a.merge(&b, "tn.");
        assert_eq!(off, 1);
        assert_eq!(a.vars.len(), 2);
        assert_eq!(a.boundary_vars["tn.p_T"], vec![VarId(1)]);
        assert_eq!(a.objective_value(&[1.0, 1.0]), 3.0);
    }
}
