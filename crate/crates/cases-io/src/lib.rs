//! Scenario ingestion and the built-in cases.
//!
//! A scenario bundles the feeder cases, the road network, the physical
//! coupling map (which feeder node supplies which station, at which grid
//! price), the algorithm parameters, and the linearization grids. Every
//! numeric field carries a provenance tag — `paper` for values taken from
//! published tables, `reconstructed` for values the built-in cases fill in
//! where no source exists, `default` for the documented fallbacks — and
//! loading a file echoes every applied default into both the structure and
//! the provenance map, so nothing is defaulted silently.

use std::collections::BTreeMap;
use std::path::Path;

use coordination::AlgoParams;
use model_pdn::{build_pdn_multi, PdnCase, PdnVars};
use model_tn::{build_tn_ir, enumerate_paths, PathSet, PwlConfig, TnCase, TnVars};
use opt_ir::ProblemIR;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("schema violation at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("unknown built-in case {0:?} (expected \"case1\" or \"case2\")")]
    UnknownCase(String),
    #[error(transparent)]
    Pdn(#[from] model_pdn::PdnError),
    #[error(transparent)]
    Tn(#[from] model_tn::TnError),
    #[error(transparent)]
    Coord(#[from] coordination::CoordError),
}

/// Where a numeric value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Reconstructed,
    Default,
}

/// One row of the physical coupling table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub tn_node: u32,
    /// Index into the scenario's feeder list.
    pub feeder: usize,
    pub feeder_node: String,
    /// Grid price of the supplying feeder, $/MWh.
    pub grid_price: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub pdn: Vec<PdnCase>,
    pub tn: TnCase,
    pub coupling: Vec<CouplingRow>,
    pub algo: AlgoParams,
    pub pwl: PwlConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub provenance: BTreeMap<String, Provenance>,
}

/// The IRs and bookkeeping a scenario builds into.
pub struct BuiltScenario {
    pub pdn_ir: ProblemIR,
    pub pdn_vars: Vec<PdnVars>,
    pub tn_ir: ProblemIR,
    pub tn_vars: TnVars,
    pub paths: PathSet,
}

impl ScenarioConfig {
    /// Structural validation: station/feeder pairing is a bijection in
    /// declaration order, referenced nodes exist, parameters are sane.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let schema = |field: &str, message: String| ScenarioError::Schema {
            field: field.into(),
            message,
        };
        self.algo.validate().map_err(|e| schema("algo", e.to_string()))?;
        let stations = self.tn.stations();
        if stations.len() != self.coupling.len() {
            return Err(schema(
                "coupling",
                format!(
                    "{} rows for {} stations (every station appears exactly once)",
                    self.coupling.len(),
                    stations.len()
                ),
            ));
        }
        if self.pdn.len() != self.coupling.len() {
            return Err(schema(
                "coupling",
                format!("{} rows for {} feeders", self.coupling.len(), self.pdn.len()),
            ));
        }
        for (i, row) in self.coupling.iter().enumerate() {
            let field = format!("coupling[{i}]");
            if row.feeder != i {
                return Err(schema(
                    &field,
                    format!(
                        "feeder index {} out of order (rows follow the feeder list)",
                        row.feeder
                    ),
                ));
            }
            if stations[i] != row.tn_node {
                return Err(schema(
                    &field,
                    format!(
                        "tn_node {} does not match station order ({})",
                        row.tn_node, stations[i]
                    ),
                ));
            }
            let feeder = &self.pdn[i];
            let node = feeder
                .node_index(&row.feeder_node)
                .ok_or_else(|| {
                    schema(
                        &field,
                        format!("feeder node {:?} absent from {:?}", row.feeder_node, feeder.name),
                    )
                })?;
            if !feeder.nodes[node].has_evcs {
                return Err(schema(
                    &field,
                    format!("feeder node {:?} carries no station", row.feeder_node),
                ));
            }
            let evcs = feeder.evcs_nodes();
            if evcs.len() != 1 {
                return Err(schema(
                    &field,
                    format!("feeder {:?} hosts {} stations, expected 1", feeder.name, evcs.len()),
                ));
            }
            if (feeder.grid_price - row.grid_price).abs() > 1e-9 {
                return Err(schema(
                    &field,
                    format!(
                        "grid price {} disagrees with feeder's {}",
                        row.grid_price, feeder.grid_price
                    ),
                ));
            }
            feeder.validate()?;
        }
        self.tn.validate()?;
        Ok(())
    }

    /// Build both subproblem IRs; boundary vectors line up with the coupling
    /// rows on both sides.
    pub fn build(&self) -> Result<BuiltScenario, ScenarioError> {
        self.validate()?;
        let (pdn_ir, pdn_vars) = build_pdn_multi(&self.pdn)?;
        let paths = enumerate_paths(&self.tn)?;
        let (tn_ir, tn_vars) = build_tn_ir(&self.tn, &paths, &self.pwl)?;
        Ok(BuiltScenario {
            pdn_ir,
            pdn_vars,
            tn_ir,
            tn_vars,
            paths,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Fields tagged with each provenance class.
    pub fn provenance_report(&self) -> String {
        let mut out = String::new();
        for tag in [Provenance::Paper, Provenance::Reconstructed, Provenance::Default] {
            let fields: Vec<&str> = self
                .provenance
                .iter()
                .filter(|(_, t)| **t == tag)
                .map(|(f, _)| f.as_str())
                .collect();
            out.push_str(&format!("{tag:?}: {} fields\n", fields.len()).to_lowercase());
            for f in fields {
                out.push_str(&format!("  {f}\n"));
            }
        }
        out
    }
}

/// Load and validate a scenario file, echoing applied defaults into the
/// provenance map.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, ScenarioError> {
    let path_str = path.as_ref().display().to_string();
    let text = std::fs::read_to_string(&path).map_err(|source| ScenarioError::Io {
        path: path_str.clone(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| ScenarioError::Parse {
            path: path_str.clone(),
            source,
        })?;
    let mut config: ScenarioConfig =
        serde_json::from_value(value.clone()).map_err(|source| ScenarioError::Parse {
            path: path_str,
            source,
        })?;
    // any block the file omitted got serde defaults: tag them
    for (key, field) in [("algo", "algo"), ("pwl", "pwl"), ("seed", "seed")] {
        if value.get(key).is_none() {
            config.provenance.insert(field.into(), Provenance::Default);
        }
    }
    config.validate()?;
    Ok(config)
}

pub fn save_scenario(
    config: &ScenarioConfig,
    path: impl AsRef<Path>,
) -> Result<(), ScenarioError> {
    std::fs::write(&path, config.to_json()).map_err(|source| ScenarioError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

/// The shipped reconstructions: `"case1"` (3 x 13-node feeders, 5-node road
/// network) and `"case2"` (4 x 33-node feeders, Nguyen-Dupuis network).
pub fn builtin_case(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    let (pdn, tn, label): (Vec<PdnCase>, TnCase, &str) = match name {
        "case1" => (
            (0..3).map(model_pdn::case1_feeder).collect(),
            model_tn::case1_tn(),
            "case1",
        ),
        "case2" => (
            (0..4).map(model_pdn::case2_feeder).collect(),
            model_tn::case2_tn(),
            "case2",
        ),
        other => return Err(ScenarioError::UnknownCase(other.into())),
    };
    let stations = tn.stations();
    let coupling: Vec<CouplingRow> = pdn
        .iter()
        .enumerate()
        .map(|(i, feeder)| {
            let node = feeder.evcs_nodes()[0];
            CouplingRow {
                tn_node: stations[i],
                feeder: i,
                feeder_node: feeder.nodes[node].id.clone(),
                grid_price: feeder.grid_price,
            }
        })
        .collect();
    let mut provenance = BTreeMap::new();
    for (i, row) in coupling.iter().enumerate() {
        provenance.insert(format!("coupling[{i}].tn_node"), Provenance::Paper);
        provenance.insert(format!("coupling[{i}].feeder_node"), Provenance::Paper);
        provenance.insert(format!("coupling[{i}].grid_price"), Provenance::Paper);
        provenance.insert(format!("pdn[{i}].grid_price"), Provenance::Paper);
        provenance.insert(format!("pdn[{i}].nodes[{}].pv_p", row.feeder_node), Provenance::Paper);
        provenance.insert(format!("pdn[{i}].loads"), Provenance::Reconstructed);
        provenance.insert(format!("pdn[{i}].lines"), Provenance::Reconstructed);
        provenance.insert(format!("pdn[{i}].evcs_p_max_kw"), Provenance::Default);
    }
    for (key, tag) in [
        ("algo.eps", Provenance::Paper),
        ("algo.eps_u", Provenance::Paper),
        ("algo.gamma", Provenance::Paper),
        ("algo.max_outer", Provenance::Paper),
        ("algo.phi0_p", Provenance::Paper),
        ("algo.phi0_v", Provenance::Paper),
        ("algo.admm_rho", Provenance::Default),
        ("algo.inner_cap", Provenance::Default),
        ("pwl.bpr_segments", Provenance::Default),
        ("pwl.bpr_xmax_factor", Provenance::Default),
        ("pwl.coupling_segments", Provenance::Default),
        ("tn.time_value", Provenance::Default),
        ("tn.evcs_p_max_kw", Provenance::Default),
    ] {
        provenance.insert(key.into(), tag);
    }
    for (i, od) in tn.od_pairs.iter().enumerate() {
        provenance.insert(format!("tn.od_pairs[{i}].demand"), Provenance::Paper);
        for f in ["e_max", "e_min", "e_0", "kwh_per_mile", "anxiety"] {
            provenance.insert(format!("tn.od_pairs[{i}].{f}"), Provenance::Default);
        }
        let _ = od;
    }
    let arc_tag = if label == "case1" {
        Provenance::Paper
    } else {
        Provenance::Reconstructed
    };
    for arc in &tn.arcs {
        for f in ["t0_min", "capacity", "miles"] {
            provenance.insert(
                format!("tn.arcs[{}-{}].{f}", arc.from, arc.to),
                arc_tag,
            );
        }
    }
    for node in tn.nodes.iter().filter(|n| n.has_evcs) {
        for f in [
            "b_max",
            "pile_kw",
            "wait_base_min",
            "congestion_min_per_veh",
            "price_per_kwh",
        ] {
            provenance.insert(format!("tn.nodes[{}].{f}", node.id), Provenance::Default);
        }
    }
    let config = ScenarioConfig {
        name: label.into(),
        pdn,
        tn,
        coupling,
        algo: AlgoParams::default(),
        pwl: PwlConfig::default(),
        seed: 0,
        provenance,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case1_shape_and_parameters() {
        let c = builtin_case("case1").unwrap();
        assert_eq!(c.pdn.len(), 3);
        assert_eq!(c.tn.nodes.len(), 5);
        assert_eq!(c.tn.od_pairs.len(), 2);
        for od in &c.tn.od_pairs {
            assert_eq!(od.demand, 30.0);
        }
        // coupling table values
        let rows: Vec<(u32, &str, f64)> = c
            .coupling
            .iter()
            .map(|r| (r.tn_node, r.feeder_node.as_str(), r.grid_price))
            .collect();
        assert_eq!(
            rows,
            vec![(2, "633", 70.47), (3, "650", 77.52), (5, "680", 84.57)]
        );
        // algorithm parameters
        assert_eq!(c.algo.eps, 6e-3);
        assert_eq!(c.algo.eps_u, 1e-1);
        assert_eq!(c.algo.gamma, 4e-6);
        assert_eq!(c.algo.max_outer, 300);
        assert_eq!(c.algo.phi0_p, -9999.0);
        assert_eq!(c.algo.phi0_v, -99999.0);
        // arc table row and PV size
        let arc = c
            .tn
            .arcs
            .iter()
            .find(|a| a.from == 1 && a.to == 2)
            .unwrap();
        assert_eq!((arc.t0_min, arc.capacity, arc.miles), (120.0, 40.0, 150.0));
        let f1 = &c.pdn[0];
        let evcs = &f1.nodes[f1.evcs_nodes()[0]];
        assert_eq!(evcs.pv_p, 0.2);
    }

    #[test]
    fn case2_shape() {
        let c = builtin_case("case2").unwrap();
        assert_eq!(c.pdn.len(), 4);
        assert_eq!(c.tn.od_pairs.len(), 4);
        for od in &c.tn.od_pairs {
            assert_eq!(od.demand, 60.0);
        }
        assert_eq!(
            c.coupling.iter().map(|r| r.grid_price).collect::<Vec<_>>(),
            vec![70.47, 77.52, 84.57, 91.62]
        );
        assert!(c
            .provenance
            .iter()
            .any(|(k, t)| k.starts_with("tn.arcs") && *t == Provenance::Reconstructed));
    }

    #[test]
    fn unknown_case_rejected() {
        assert!(matches!(
            builtin_case("case9"),
            Err(ScenarioError::UnknownCase(_))
        ));
    }

    #[test]
    fn round_trip_exact() {
        let c = builtin_case("case1").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("case1.json");
        save_scenario(&c, &path).unwrap();
        let again = load_scenario(&path).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn coupling_referencing_absent_node_rejected() {
        let mut c = builtin_case("case1").unwrap();
        c.coupling[0].feeder_node = "999".into();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("coupling[0]"), "{err}");
    }

    #[test]
    fn builds_both_sides() {
        let c = builtin_case("case1").unwrap();
        let built = c.build().unwrap();
        assert_eq!(built.pdn_ir.boundary_vars["p_D"].len(), 3);
        assert_eq!(built.tn_ir.boundary_vars["p_T"].len(), 3);
        assert!(built.pdn_ir.validate().is_empty());
        assert!(built.tn_ir.validate().is_empty());
    }

    #[test]
    fn provenance_report_mentions_classes() {
        let c = builtin_case("case1").unwrap();
        let report = c.provenance_report();
        assert!(report.contains("paper"));
        assert!(report.contains("reconstructed"));
        assert!(report.contains("default"));
        assert!(report.contains("coupling[0].grid_price"));
    }
}
