//! Path enumeration with the two retention filters: every kept path visits
//! at least one EVCS node, and no kept path is longer than twice the shortest
//! enumerated path of its O-D pair.

use serde::{Deserialize, Serialize};

use crate::{TnCase, TnError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<u32>,
    /// Arc indices into `TnCase::arcs`, one per hop.
    pub arcs: Vec<usize>,
    pub miles: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    /// Parallel to `TnCase::od_pairs`.
    pub per_od: Vec<Vec<Path>>,
}

/// Enumerate all simple paths per O-D pair, apply the EVCS filter, then the
/// double-length filter. Paths come out sorted by node sequence.
pub fn enumerate_paths(case: &TnCase) -> Result<PathSet, TnError> {
    case.validate()?;
    let mut per_od = Vec::with_capacity(case.od_pairs.len());
    for od in &case.od_pairs {
        let mut all = Vec::new();
        let mut stack = vec![od.origin];
        let mut arc_stack: Vec<usize> = Vec::new();
        dfs(case, od.dest, &mut stack, &mut arc_stack, &mut all);
        all.sort_by(|a, b| a.nodes.cmp(&b.nodes));
        if all.is_empty() {
            return Err(TnError::NoFeasiblePath {
                origin: od.origin,
                dest: od.dest,
            });
        }
        let shortest = all.iter().map(|p| p.miles).fold(f64::INFINITY, f64::min);
        let kept: Vec<Path> = all
            .into_iter()
            .filter(|p| p.nodes.iter().any(|&n| case.node(n).unwrap().has_evcs))
            .filter(|p| p.miles <= 2.0 * shortest + 1e-9)
            .collect();
        if kept.is_empty() {
            return Err(TnError::NoFeasiblePath {
                origin: od.origin,
                dest: od.dest,
            });
        }
        per_od.push(kept);
    }
    Ok(PathSet { per_od })
}

fn dfs(case: &TnCase, dest: u32, stack: &mut Vec<u32>, arc_stack: &mut Vec<usize>, out: &mut Vec<Path>) {
    let here = *stack.last().unwrap();
    if here == dest {
        let miles = arc_stack.iter().map(|&a| case.arcs[a].miles).sum();
        out.push(Path {
            nodes: stack.clone(),
            arcs: arc_stack.clone(),
            miles,
        });
        return;
    }
    // arcs scanned in declaration order keeps enumeration deterministic
    for (ai, arc) in case.arcs.iter().enumerate() {
        if arc.from == here && !stack.contains(&arc.to) {
            stack.push(arc.to);
            arc_stack.push(ai);
            dfs(case, dest, stack, arc_stack, out);
            stack.pop();
            arc_stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{OdPair, TnArc, TnNode};

    fn node(id: u32, evcs: bool) -> TnNode {
        TnNode {
            id,
            has_evcs: evcs,
            b_max: 55.0,
            pile_kw: 150.0,
            wait_base_min: 10.0,
            congestion_min_per_veh: 0.2,
            price_per_kwh: 0.08,
        }
    }

    fn arc(from: u32, to: u32, miles: f64) -> TnArc {
        TnArc {
            from,
            to,
            t0_min: miles,
            capacity: 40.0,
            miles,
        }
    }

    fn od(origin: u32, dest: u32) -> OdPair {
        OdPair {
            origin,
            dest,
            demand: 10.0,
            e_max: 55.0,
            e_min: 5.5,
            e_0: 50.0,
            kwh_per_mile: 0.2,
            anxiety: 0.05,
        }
    }

    #[test]
    fn triangle_long_detour_removed() {
        // A->B direct 1 mile; A->C->B is 3 miles > 2x shortest; all EVCS
        let case = TnCase {
            name: "tri".into(),
            nodes: vec![node(1, true), node(2, true), node(3, true)],
            arcs: vec![arc(1, 2, 1.0), arc(1, 3, 1.5), arc(3, 2, 1.5)],
            od_pairs: vec![od(1, 2)],
            time_value: 0.5,
            evcs_p_max_kw: 1e5,
        };
        let ps = enumerate_paths(&case).unwrap();
        assert_eq!(ps.per_od[0].len(), 1);
        assert_eq!(ps.per_od[0][0].nodes, vec![1, 2]);
    }

    #[test]
    fn no_evcs_anywhere_is_an_error() {
        let case = TnCase {
            name: "bare".into(),
            nodes: vec![node(1, false), node(2, false)],
            arcs: vec![arc(1, 2, 1.0)],
            od_pairs: vec![od(1, 2)],
            time_value: 0.5,
            evcs_p_max_kw: 1e5,
        };
        assert!(matches!(
            enumerate_paths(&case),
            Err(TnError::NoFeasiblePath { .. })
        ));
    }

    #[test]
    fn case1_od_keeps_both_shapes() {
        let case = crate::case1_tn();
        let ps = enumerate_paths(&case).unwrap();
        let routes: Vec<Vec<u32>> = ps.per_od[0].iter().map(|p| p.nodes.clone()).collect();
        assert!(routes.contains(&vec![1, 2, 3, 4]));
        assert!(routes.contains(&vec![1, 5, 4]));
        assert_eq!(routes.len(), 2);
        // reverse O-D mirrors
        let rev: Vec<Vec<u32>> = ps.per_od[1].iter().map(|p| p.nodes.clone()).collect();
        assert!(rev.contains(&vec![4, 3, 2, 1]));
        assert!(rev.contains(&vec![4, 5, 1]));
    }

    #[test]
    fn deterministic_ordering() {
        let case = crate::case2_tn();
        let a = enumerate_paths(&case).unwrap();
        let b = enumerate_paths(&case).unwrap();
        assert_eq!(a, b);
        for paths in &a.per_od {
            for w in paths.windows(2) {
                assert!(w[0].nodes < w[1].nodes);
            }
        }
    }
}
