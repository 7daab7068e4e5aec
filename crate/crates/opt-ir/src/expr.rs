use serde::{Deserialize, Serialize};

use crate::problem::VarId;

/// A linear expression `sum(coeff_i * var_i) + constant`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    #[serde(default)]
    pub constant: f64,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn term(var: VarId, coeff: f64) -> Self {
        Self {
            terms: vec![(var, coeff)],
            constant: 0.0,
        }
    }

    pub fn add_term(&mut self, var: VarId, coeff: f64) -> &mut Self {
        self.terms.push((var, coeff));
        self
    }

    /// Merge duplicate variables, drop zero coefficients, sort by id.
    pub fn normalize(&mut self) {
        self.terms.sort_by_key(|(v, _)| *v);
        let mut out: Vec<(VarId, f64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match out.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|(_, c)| *c != 0.0);
        self.terms = out;
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut acc = self.constant;
        for &(v, c) in &self.terms {
            acc += c * x[v.index()];
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.constant.is_finite() && self.terms.iter().all(|(_, c)| c.is_finite())
    }
}

/// Direction of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "le")]
    Le,
    #[serde(rename = "eq")]
    Eq,
    #[serde(rename = "ge")]
    Ge,
}

/// A linear row `expr (<= | = | >=) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinConstraint {
    pub expr: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
}

impl LinConstraint {
    pub fn new(expr: LinExpr, sense: Sense, rhs: f64) -> Self {
        Self {
            expr: expr.normalized(),
            sense,
            rhs,
            name: String::new(),
        }
    }

    pub fn named(expr: LinExpr, sense: Sense, rhs: f64, name: impl Into<String>) -> Self {
        Self {
            expr: expr.normalized(),
            sense,
            rhs,
            name: name.into(),
        }
    }

    /// Signed violation at `x`: positive means the row is violated by that amount.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let v = self.expr.value(x);
        match self.sense {
            Sense::Le => v - self.rhs,
            Sense::Ge => self.rhs - v,
            Sense::Eq => (v - self.rhs).abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_merges_and_sorts() {
        let mut e = LinExpr::zero();
        e.add_term(VarId(3), 2.0)
            .add_term(VarId(1), 1.0)
            .add_term(VarId(3), -2.0)
            .add_term(VarId(0), 0.5);
        e.normalize();
        assert_eq!(e.terms, vec![(VarId(0), 0.5), (VarId(1), 1.0)]);
    }

    #[test]
    fn violation_signs() {
        let c = LinConstraint::new(LinExpr::term(VarId(0), 1.0), Sense::Le, 1.0);
        assert!(c.violation(&[2.0]) > 0.0);
        assert!(c.violation(&[0.5]) < 0.0);
        let g = LinConstraint::new(LinExpr::term(VarId(0), 1.0), Sense::Ge, 1.0);
        assert!(g.violation(&[0.5]) > 0.0);
    }
}
