//! Power-distribution-network subproblem builder.
//!
//! Feeders are radial; power flow uses the DistFlow branch model with the
//! nonconvex branch equation replaced by its convex hull: a rotated cone
//! `p^2 + q^2 <= v*l` plus the secant hyperplane on `(v, l)`. The EVCS demand
//! at coupling nodes is the boundary variable group `"p_D"`, carried in kW so
//! the coordination layer's price/penalty arithmetic stays at the scale the
//! shipped algorithm parameters expect.
//!
//! Internally everything else is per-unit on a 1 MVA base (so pu power == MW).

mod build;
mod cases;

pub use build::{
    attach_augmented_objective_pdn, build_pdn_ir, build_pdn_multi, extract_dispatch,
    EvcsVars, PdnDispatch, PdnVars,
};
pub use cases::{case1_feeder, case2_feeder, CASE1_FEEDERS, CASE2_FEEDERS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// kW per pu on the 1 MVA base.
pub const KW_PER_PU: f64 = 1000.0;

#[derive(Debug, Error)]
pub enum PdnError {
    #[error("node {0:?} is not reachable from the grid node")]
    Unreachable(String),
    #[error("node {0:?} has {1} parent lines (radial feeders need exactly one)")]
    NotRadial(String, usize),
    #[error("grid node {0:?} has a parent line")]
    GridHasParent(String),
    #[error("unknown node {0:?} referenced by a line")]
    UnknownNode(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("bad data: {0}")]
    BadData(String),
    #[error("dimension mismatch: expected {expected} EVCS entries, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Ir(#[from] opt_ir::IrError),
}

/// One feeder bus. Voltage bounds are squared per-unit magnitudes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PdnNode {
    pub id: String,
    /// Active load, MW.
    pub p_load: f64,
    /// Reactive load, MVAr.
    pub q_load: f64,
    /// Solar PV injection, MW (unity power factor).
    pub pv_p: f64,
    pub has_evcs: bool,
    /// Lower bound on squared voltage, pu^2.
    pub v_min: f64,
    /// Upper bound on squared voltage, pu^2.
    pub v_max: f64,
}

/// One distribution line, oriented parent -> child.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PdnLine {
    pub from: String,
    pub to: String,
    /// Resistance, pu.
    pub r: f64,
    /// Reactance, pu.
    pub x: f64,
    /// Squared-current limit, pu^2.
    pub ell_max: f64,
    /// Apparent-power limit, pu.
    pub s_max: f64,
}

/// A radial feeder with one grid connection and its price.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PdnCase {
    pub name: String,
    pub nodes: Vec<PdnNode>,
    pub lines: Vec<PdnLine>,
    pub grid_node: String,
    /// Grid energy price, $/MWh.
    pub grid_price: f64,
    /// EVCS power-factor angle, radians.
    pub evcs_pf_angle: f64,
    /// EVCS hosting capacity per station, kW. Keeps every dual subproblem
    /// bounded even when a station sits at the grid node.
    pub evcs_p_max_kw: f64,
    /// Slack-bus voltage setpoint, squared pu.
    pub v_root: f64,
}

impl PdnCase {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Radiality and data sanity. Returns the parent-line index per node
    /// (grid node has none).
    pub fn validate(&self) -> Result<Vec<Option<usize>>, PdnError> {
        for (i, n) in self.nodes.iter().enumerate() {
            if self.nodes[..i].iter().any(|m| m.id == n.id) {
                return Err(PdnError::DuplicateNode(n.id.clone()));
            }
            if n.v_min > n.v_max || n.v_min < 0.0 {
                return Err(PdnError::BadData(format!("voltage bounds of {:?}", n.id)));
            }
        }
        let grid = self
            .node_index(&self.grid_node)
            .ok_or_else(|| PdnError::UnknownNode(self.grid_node.clone()))?;
        let mut parent: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (li, line) in self.lines.iter().enumerate() {
            let to = self
                .node_index(&line.to)
                .ok_or_else(|| PdnError::UnknownNode(line.to.clone()))?;
            self.node_index(&line.from)
                .ok_or_else(|| PdnError::UnknownNode(line.from.clone()))?;
            if line.r < 0.0 || line.x < 0.0 {
                return Err(PdnError::BadData(format!(
                    "negative impedance on line {}->{}",
                    line.from, line.to
                )));
            }
            parent[to].push(li);
        }
        if !parent[grid].is_empty() {
            return Err(PdnError::GridHasParent(self.grid_node.clone()));
        }
        let mut out = vec![None; self.nodes.len()];
        for (ni, links) in parent.iter().enumerate() {
            if ni == grid {
                continue;
            }
            if links.len() != 1 {
                return Err(PdnError::NotRadial(self.nodes[ni].id.clone(), links.len()));
            }
            out[ni] = Some(links[0]);
        }
        // reachability from the grid node
        let mut seen = vec![false; self.nodes.len()];
        seen[grid] = true;
        let mut frontier = vec![grid];
        while let Some(n) = frontier.pop() {
            for (li, line) in self.lines.iter().enumerate() {
                let from = self.node_index(&line.from).unwrap();
                let to = self.node_index(&line.to).unwrap();
                if from == n && !seen[to] {
                    // only tree edges (the parent check above rules out extras)
                    let _ = li;
                    seen[to] = true;
                    frontier.push(to);
                }
            }
        }
        if let Some(ni) = seen.iter().position(|s| !s) {
            return Err(PdnError::Unreachable(self.nodes[ni].id.clone()));
        }
        Ok(out)
    }

    /// EVCS node indices in declaration order.
    pub fn evcs_nodes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.has_evcs)
            .map(|(i, _)| i)
            .collect()
    }
}
