//! Branch-and-bound for linear-objective mixed-integer convex programs:
//! binary branching (most fractional), SOS2 branching (window split at the
//! weighted-average member), best-bound node order, and rotated-cone outer
//! approximation at every node. Cuts are globally valid and shared across
//! the tree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use opt_ir::{FixPlan, ProblemIR, Solution, SolveStatus, VarKind, SOS2_ZERO_TOL};

use crate::continuous::cut_loop;
use crate::simplex::{BasisSnapshot, LpStatus, Simplex};
use crate::std_form::{build_std_form, StdForm};
use crate::{SolveError, SolveOptions};

struct Node {
    id: u64,
    bound: f64,
    overrides: Vec<(u32, f64, f64)>,
    windows: BTreeMap<usize, (usize, usize)>,
    basis: Option<BasisSnapshot>,
}

struct HeapKey {
    bound: f64,
    id: u64,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for HeapKey {}
impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap: invert so the smallest bound pops first,
        // ties resolved toward the lowest node id.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Solve a linear-objective MICP (binaries + SOS2 + cones) to global
/// optimality within tolerance, or return the best incumbent and a valid
/// dual bound when the node budget runs out.
pub fn solve_micp_linear(ir: &ProblemIR, opts: &SolveOptions) -> Result<Solution, SolveError> {
    if !ir.obj_quad.is_empty() {
        return Err(SolveError::InvalidInput(
            "solve_micp_linear: quadratic objective present (fix binaries and use solve_qp)"
                .into(),
        ));
    }
    let form = build_std_form(ir, false)?;
    let mut sim = Simplex::new(form.lp.clone());
    let binaries: Vec<usize> = ir
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary && v.lower < v.upper)
        .map(|v| v.id.index())
        .collect();

    let mut incumbent: Option<(f64, Vec<f64>)> = None; // (simplex obj, structural x)

    // warm hint: evaluate the caller's fixing plan to seed the incumbent
    if let Some(plan) = &opts.hint {
        if let Some(node) = hint_node(ir, plan) {
            apply_node(&mut sim, &form, ir, &node);
            let mut status = sim.solve_from_scratch();
            let unresolved = cut_loop(ir, &form, &mut sim, &mut status, opts);
            if status == LpStatus::Optimal && unresolved == 0 {
                let x = sim.x()[..form.n_vars].to_vec();
                if is_integer_feasible(ir, &binaries, &x, opts).is_none() {
                    incumbent = Some((sim.objective(), x));
                }
            }
        }
    }

    let mut heap: BinaryHeap<HeapKey> = BinaryHeap::new();
    let mut nodes: BTreeMap<u64, Node> = BTreeMap::new();
    let mut next_id: u64 = 0;
    let root = Node {
        id: 0,
        bound: f64::NEG_INFINITY,
        overrides: Vec::new(),
        windows: BTreeMap::new(),
        basis: None,
    };
    heap.push(HeapKey {
        bound: root.bound,
        id: root.id,
    });
    nodes.insert(0, root);
    next_id += 1;

    let mut processed = 0usize;
    let mut global_bound = f64::NEG_INFINITY;
    let mut hit_limit = false;

    while let Some(key) = heap.pop() {
        let node = nodes.remove(&key.id).expect("node for heap key");
        global_bound = global_bound.max(node.bound);
        if let Some((inc_obj, _)) = incumbent {
            if node.bound >= inc_obj - prune_eps(inc_obj) {
                // best-bound order: every remaining node is at least as bad
                global_bound = inc_obj;
                break;
            }
        }
        if processed >= opts.max_bb_nodes {
            hit_limit = true;
            global_bound = node.bound.max(global_bound);
            break;
        }
        processed += 1;

        apply_node(&mut sim, &form, ir, &node);
        let mut status = match &node.basis {
            Some(snap) => {
                sim.restore(snap);
                sim.resolve_dual()
            }
            None => sim.solve_from_scratch(),
        };
        let unresolved = cut_loop(ir, &form, &mut sim, &mut status, opts);
        match status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Ok(Solution::unbounded(form.n_vars));
            }
            LpStatus::IterLimit => {
                // one cold retry before giving up on the subtree honestly
                apply_node(&mut sim, &form, ir, &node);
                status = sim.solve_from_scratch();
                let unresolved2 = cut_loop(ir, &form, &mut sim, &mut status, opts);
                if status != LpStatus::Optimal || unresolved2 != 0 {
                    hit_limit = true;
                    break;
                }
            }
            LpStatus::Optimal => {
                if unresolved != 0 {
                    hit_limit = true;
                    break;
                }
            }
        }
        let obj = sim.objective();
        if let Some((inc_obj, _)) = incumbent {
            if obj >= inc_obj - prune_eps(inc_obj) {
                continue;
            }
        }
        let x = sim.x()[..form.n_vars].to_vec();
        match is_integer_feasible(ir, &binaries, &x, opts) {
            None => {
                let better = incumbent
                    .as_ref()
                    .map_or(true, |(inc_obj, _)| obj < *inc_obj);
                if better {
                    incumbent = Some((obj, x));
                }
            }
            Some(branch) => {
                let snap = sim.snapshot();
                for (overrides, windows) in children(&node, branch, &x, ir) {
                    let child = Node {
                        id: next_id,
                        bound: obj,
                        overrides,
                        windows,
                        basis: Some(snap.clone()),
                    };
                    heap.push(HeapKey {
                        bound: child.bound,
                        id: child.id,
                    });
                    nodes.insert(next_id, child);
                    next_id += 1;
                }
            }
        }
    }

    match incumbent {
        None => {
            if hit_limit {
                Err(SolveError::Numerical(format!(
                    "branch-and-bound stopped after {processed} nodes without an incumbent"
                )))
            } else {
                Ok(Solution::infeasible(form.n_vars))
            }
        }
        Some((obj, x)) => {
            let exhausted = heap.is_empty() && !hit_limit;
            let bound = if exhausted || global_bound == f64::NEG_INFINITY || global_bound > obj {
                obj
            } else {
                global_bound
            };
            let objective = ir.objective_value(&x);
            Ok(Solution {
                values: x,
                objective,
                status: if hit_limit {
                    SolveStatus::IterationLimit
                } else {
                    SolveStatus::Optimal
                },
                bound: bound + form.obj_offset,
            })
        }
    }
}

fn prune_eps(inc_obj: f64) -> f64 {
    1e-9_f64.max(1e-9 * inc_obj.abs())
}

/// What to branch on at a fractional point.
enum Branch {
    Binary(usize),
    Sos2 { set: usize, split: usize },
}

/// Returns `None` when integer feasible, otherwise the branching decision:
/// most-fractional binary first (ties to the lowest id), then the most
/// dispersed violated SOS2 set split at its weighted-average member.
fn is_integer_feasible(
    ir: &ProblemIR,
    binaries: &[usize],
    x: &[f64],
    opts: &SolveOptions,
) -> Option<Branch> {
    let mut best: Option<(usize, f64)> = None;
    for &col in binaries {
        let frac = (x[col] - x[col].round()).abs();
        if frac > opts.tol_int && best.map_or(true, |(_, bf)| frac > bf) {
            best = Some((col, frac));
        }
    }
    if let Some((col, _)) = best {
        return Some(Branch::Binary(col));
    }
    let mut best_set: Option<(usize, f64, usize)> = None; // (set, dispersion, split)
    for (si, set) in ir.sos2.iter().enumerate() {
        if set.adjacency_ok(x, SOS2_ZERO_TOL) {
            continue;
        }
        let mut mass = 0.0;
        let mut center = 0.0;
        for (i, m) in set.members.iter().enumerate() {
            let w = x[m.index()].abs();
            mass += w;
            center += w * i as f64;
        }
        if mass <= SOS2_ZERO_TOL {
            continue;
        }
        center /= mass;
        let dispersion: f64 = set
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| x[m.index()].abs() * (i as f64 - center).abs())
            .sum();
        let split = center.round() as usize;
        if best_set.map_or(true, |(_, bd, _)| dispersion > bd) {
            best_set = Some((si, dispersion, split));
        }
    }
    best_set.map(|(set, _, split)| Branch::Sos2 { set, split })
}

/// Build the two children of a branching decision.
fn children(
    node: &Node,
    branch: Branch,
    _x: &[f64],
    ir: &ProblemIR,
) -> Vec<(Vec<(u32, f64, f64)>, BTreeMap<usize, (usize, usize)>)> {
    match branch {
        Branch::Binary(col) => {
            let mut lo = node.overrides.clone();
            lo.push((col as u32, 0.0, 0.0));
            let mut hi = node.overrides.clone();
            hi.push((col as u32, 1.0, 1.0));
            vec![(lo, node.windows.clone()), (hi, node.windows.clone())]
        }
        Branch::Sos2 { set, split } => {
            let n = ir.sos2[set].members.len();
            let (lo, hi) = node.windows.get(&set).copied().unwrap_or((0, n - 1));
            let split = split.clamp(lo + 1, hi.saturating_sub(1).max(lo + 1));
            let mut left = node.windows.clone();
            left.insert(set, (lo, split));
            let mut right = node.windows.clone();
            right.insert(set, (split, hi));
            vec![
                (node.overrides.clone(), left),
                (node.overrides.clone(), right),
            ]
        }
    }
}

/// Reset structural bounds to the IR's, then apply node overrides and
/// SOS2 windows (members outside a window are clamped to zero).
fn apply_node(sim: &mut Simplex, form: &StdForm, ir: &ProblemIR, node: &Node) {
    for col in 0..form.n_vars {
        let spec = &ir.vars[col];
        sim.set_bounds(col, spec.lower, spec.upper);
    }
    for &(col, l, u) in &node.overrides {
        sim.set_bounds(col as usize, l, u);
    }
    for (&set, &(lo, hi)) in &node.windows {
        for (i, m) in ir.sos2[set].members.iter().enumerate() {
            if i < lo || i > hi {
                sim.set_bounds(m.index(), 0.0, 0.0);
            }
        }
    }
}

/// Translate a fixing plan into a pseudo-node (binaries fixed, every SOS2 set
/// narrowed to its planned adjacent pair). Returns `None` when the plan does
/// not match this IR's structure.
fn hint_node(ir: &ProblemIR, plan: &FixPlan) -> Option<Node> {
    let mut overrides = Vec::new();
    for (&var, &b) in &plan.binaries {
        let spec = ir.vars.get(var.index())?;
        if spec.kind != VarKind::Binary {
            return None;
        }
        overrides.push((var.0, b as f64, b as f64));
    }
    let mut windows = BTreeMap::new();
    for (label, &start) in &plan.sos2_windows {
        let (si, set) = ir
            .sos2
            .iter()
            .enumerate()
            .find(|(_, s)| &s.label == label)?;
        if start + 1 >= set.members.len() {
            return None;
        }
        windows.insert(si, (start, start + 1));
    }
    Some(Node {
        id: u64::MAX,
        bound: f64::NEG_INFINITY,
        overrides,
        windows,
        basis: None,
    })
}
