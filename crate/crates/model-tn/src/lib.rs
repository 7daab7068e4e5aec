//! Traffic-network subproblem builder for EV routing and charging.
//!
//! The network is a directed graph; demand moves on enumerated simple paths.
//! Congestion uses the BPR delay curve, piecewise-linearized on SOS2 grids;
//! user-equilibrium complementarity is linearized with per-path big-M rows;
//! the station power balance `p_T = sum(flow * charge)` is linearized through
//! a difference of squares, each square on its own SOS2 grid. Station powers
//! form the boundary group `"p_T"` in kW; charging prices are $/kWh.

mod build;
mod cases;
mod paths;

pub use build::{
    attach_augmented_objective_tn, bpr_breakpoints, bpr_time, build_tn_ir,
    coupling_pwl_tolerance, extract_routing, square_breakpoints, ChargeStop, OdRouting, PathRouting, PwlConfig,
    TnRouting, TnVars,
};
pub use cases::{case1_tn, case2_tn};
pub use paths::{enumerate_paths, Path, PathSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TnError {
    #[error("O-D pair {origin}->{dest} has no surviving path (EVCS and length filters)")]
    NoFeasiblePath { origin: u32, dest: u32 },
    #[error("path {path:?} cannot satisfy the energy constraints even charging everywhere")]
    EnergyInfeasiblePath { path: Vec<u32> },
    #[error("arc {from}->{to}: possible flow {flow} exceeds the PWL domain {domain}")]
    FlowExceedsPwlDomain {
        from: u32,
        to: u32,
        flow: f64,
        domain: f64,
    },
    #[error("piecewise linearization needs at least 1 segment, got {0}")]
    MissingBreakpoints(usize),
    #[error("unknown node {0} referenced")]
    UnknownNode(u32),
    #[error("duplicate arc {0}->{1}")]
    DuplicateArc(u32, u32),
    #[error("bad data: {0}")]
    BadData(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Ir(#[from] opt_ir::IrError),
}

/// A road-network node; EVCS fields are meaningful when `has_evcs`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TnNode {
    pub id: u32,
    pub has_evcs: bool,
    /// Per-vehicle charge cap at this station, kWh.
    pub b_max: f64,
    /// Rated charger power, kW.
    pub pile_kw: f64,
    /// Fixed service/wait time, minutes.
    pub wait_base_min: f64,
    /// Queue sensitivity, minutes per vehicle of station flow.
    pub congestion_min_per_veh: f64,
    /// Charging energy price, $/kWh.
    pub price_per_kwh: f64,
}

/// A directed arc with BPR delay parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TnArc {
    pub from: u32,
    pub to: u32,
    /// Free-flow travel time, minutes.
    pub t0_min: f64,
    /// BPR capacity parameter, vehicles.
    pub capacity: f64,
    /// Length, miles.
    pub miles: f64,
}

/// An origin-destination demand with its EV fleet parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OdPair {
    pub origin: u32,
    pub dest: u32,
    /// Travel demand, vehicles.
    pub demand: f64,
    /// Battery capacity, kWh.
    pub e_max: f64,
    /// Minimum stored energy, kWh.
    pub e_min: f64,
    /// Initial stored energy, kWh.
    pub e_0: f64,
    /// Consumption, kWh per mile.
    pub kwh_per_mile: f64,
    /// Range-anxiety fraction of battery capacity kept in reserve.
    pub anxiety: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TnCase {
    pub name: String,
    pub nodes: Vec<TnNode>,
    pub arcs: Vec<TnArc>,
    pub od_pairs: Vec<OdPair>,
    /// Value of time, $/minute.
    pub time_value: f64,
    /// Station power cap, kW (uniform across stations).
    pub evcs_p_max_kw: f64,
}

impl TnCase {
    pub fn node(&self, id: u32) -> Option<&TnNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// EVCS node ids in declaration order (the station / boundary order).
    pub fn stations(&self) -> Vec<u32> {
        self.nodes
            .iter()
            .filter(|n| n.has_evcs)
            .map(|n| n.id)
            .collect()
    }

    pub fn validate(&self) -> Result<(), TnError> {
        for (i, a) in self.arcs.iter().enumerate() {
            if self.node(a.from).is_none() {
                return Err(TnError::UnknownNode(a.from));
            }
            if self.node(a.to).is_none() {
                return Err(TnError::UnknownNode(a.to));
            }
            if self.arcs[..i]
                .iter()
                .any(|b| b.from == a.from && b.to == a.to)
            {
                return Err(TnError::DuplicateArc(a.from, a.to));
            }
            if a.t0_min <= 0.0 || a.capacity <= 0.0 || a.miles < 0.0 {
                return Err(TnError::BadData(format!("arc {}->{}", a.from, a.to)));
            }
        }
        for od in &self.od_pairs {
            if self.node(od.origin).is_none() {
                return Err(TnError::UnknownNode(od.origin));
            }
            if self.node(od.dest).is_none() {
                return Err(TnError::UnknownNode(od.dest));
            }
            if od.demand < 0.0 {
                return Err(TnError::BadData("negative demand".into()));
            }
            if !(od.e_min <= od.e_0 && od.e_0 <= od.e_max) {
                return Err(TnError::BadData(format!(
                    "energy bounds of {}->{}",
                    od.origin, od.dest
                )));
            }
            if !(0.0..1.0).contains(&od.anxiety) {
                return Err(TnError::BadData("anxiety fraction outside [0,1)".into()));
            }
        }
        Ok(())
    }
}
