//! Bounded-variable simplex over an explicit dense basis inverse.
//!
//! Columns hold sparse (row, coeff) entries; every row owns a slack column so
//! the all-slack basis is always available. Feasibility is reached with a
//! composite (infeasibility-sum) phase 1 — no artificial columns, which keeps
//! column indices stable when cut rows are appended later. A dual simplex
//! restores optimality after bound tightenings and row additions, which is
//! what branch-and-bound and the cutting loops lean on.

const FEAS_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const RATIO_TIE: f64 = 1e-12;
const DEGEN_STEP: f64 = 1e-11;
const BLAND_TRIGGER: usize = 80;
const REFACTOR_EVERY: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VStat {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    Free,
}

/// LP in computational form: `min cost'x  s.t.  A x = rhs` after each row is
/// given its own slack column; bounds may be infinite.
#[derive(Debug, Clone, Default)]
pub struct StdLp {
    pub cols: Vec<Vec<(u32, f64)>>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Slack column of each row, maintained by the builder and `add_row`.
    pub slack_of_row: Vec<u32>,
}

impl StdLp {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nrows(&self) -> usize {
        self.rhs.len()
    }
}

/// Basis state small enough to snapshot per branch-and-bound node.
#[derive(Debug, Clone)]
pub struct BasisSnapshot {
    basic: Vec<u32>,
    vstat: Vec<VStat>,
}

/// Outcome of a ratio test: how far the entering variable moves and which
/// basic row (if any) blocks it. `leave == None` means a bound flip.
struct Ratio {
    step: f64,
    leave: Option<(usize, f64)>,
}

pub struct Simplex {
    pub lp: StdLp,
    basic: Vec<usize>,
    vstat: Vec<VStat>,
    binv: Vec<f64>,
    x: Vec<f64>,
    pivots_since_refactor: usize,
    degen_streak: usize,
    bland: bool,
    pub max_iters: usize,
}

impl Simplex {
    pub fn new(lp: StdLp) -> Self {
        let ncols = lp.ncols();
        debug_assert_eq!(lp.slack_of_row.len(), lp.nrows());
        Self {
            lp,
            basic: Vec::new(),
            vstat: vec![VStat::AtLower; ncols],
            binv: Vec::new(),
            x: vec![0.0; ncols],
            pivots_since_refactor: 0,
            degen_streak: 0,
            bland: false,
            max_iters: 200_000,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn objective(&self) -> f64 {
        self.lp.cost.iter().zip(&self.x).map(|(c, v)| c * v).sum()
    }

    pub fn set_cost(&mut self, col: usize, c: f64) {
        self.lp.cost[col] = c;
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        self.lp.lower[col] = lower;
        self.lp.upper[col] = upper;
    }

    pub fn bounds(&self, col: usize) -> (f64, f64) {
        (self.lp.lower[col], self.lp.upper[col])
    }

    /// Append a row `sum(coeffs) + slack = rhs` with the slack bounded by
    /// `slack_lower..slack_upper`; the new slack starts basic, so a prior
    /// optimal basis remains dual feasible. Returns the slack column index.
    pub fn add_row(
        &mut self,
        coeffs: &[(u32, f64)],
        slack_lower: f64,
        slack_upper: f64,
        rhs: f64,
    ) -> usize {
        let new_row = self.lp.nrows() as u32;
        for &(col, val) in coeffs {
            if val != 0.0 {
                self.lp.cols[col as usize].push((new_row, val));
            }
        }
        let slack_col = self.lp.ncols();
        self.lp.cols.push(vec![(new_row, 1.0)]);
        self.lp.cost.push(0.0);
        self.lp.lower.push(slack_lower);
        self.lp.upper.push(slack_upper);
        self.lp.rhs.push(rhs);
        self.lp.slack_of_row.push(slack_col as u32);
        self.vstat.push(VStat::Basic);
        self.x.push(0.0);
        if !self.basic.is_empty() {
            self.basic.push(slack_col);
            self.refactor();
            self.recompute_x();
        }
        slack_col
    }

    pub fn snapshot(&self) -> BasisSnapshot {
        BasisSnapshot {
            basic: self.basic.iter().map(|&c| c as u32).collect(),
            vstat: self.vstat.clone(),
        }
    }

    /// Restore a snapshot possibly taken when the problem had fewer rows and
    /// columns; later rows get their slack basic, later columns sit nonbasic.
    pub fn restore(&mut self, snap: &BasisSnapshot) {
        let m = self.lp.nrows();
        let ncols = self.lp.ncols();
        self.vstat.clone_from(&snap.vstat);
        self.basic.clear();
        self.basic.extend(snap.basic.iter().map(|&c| c as usize));
        for col in snap.vstat.len()..ncols {
            self.vstat.push(self.default_nonbasic(col));
        }
        for row in snap.basic.len()..m {
            let slack = self.lp.slack_of_row[row] as usize;
            self.basic.push(slack);
            self.vstat[slack] = VStat::Basic;
        }
        self.refactor();
        self.recompute_x();
    }

    fn default_nonbasic(&self, col: usize) -> VStat {
        if self.lp.lower[col].is_finite() {
            VStat::AtLower
        } else if self.lp.upper[col].is_finite() {
            VStat::AtUpper
        } else {
            VStat::Free
        }
    }

    fn nonbasic_value(&self, col: usize) -> f64 {
        match self.vstat[col] {
            VStat::AtLower => self.lp.lower[col],
            VStat::AtUpper => self.lp.upper[col],
            VStat::Free => 0.0,
            VStat::Basic => unreachable!("nonbasic_value on basic column"),
        }
    }

    /// Cold start: all-slack basis, composite phase 1, then primal phase 2.
    pub fn solve_from_scratch(&mut self) -> LpStatus {
        let m = self.lp.nrows();
        self.basic = (0..m).map(|r| self.lp.slack_of_row[r] as usize).collect();
        for col in 0..self.lp.ncols() {
            self.vstat[col] = self.default_nonbasic(col);
        }
        for &col in &self.basic {
            self.vstat[col] = VStat::Basic;
        }
        self.refactor();
        self.recompute_x();
        match self.primal_phase1() {
            LpStatus::Optimal => {}
            other => return other,
        }
        self.primal_phase2()
    }

    /// Re-optimize after objective changes: the basis stays primal feasible,
    /// so run phase 2 directly (phase 1 first if drift shows).
    pub fn resolve_primal(&mut self) -> LpStatus {
        if self.basic.is_empty() {
            return self.solve_from_scratch();
        }
        self.recompute_x();
        if self.total_infeasibility() > 1e-7 {
            match self.primal_phase1() {
                LpStatus::Optimal => {}
                other => return other,
            }
        }
        self.primal_phase2()
    }

    /// Re-optimize after bound tightenings or row additions from a basis that
    /// is dual feasible for the current costs. Falls back to a full primal
    /// solve when dual feasibility does not hold.
    pub fn resolve_dual(&mut self) -> LpStatus {
        if self.basic.is_empty() {
            return self.solve_from_scratch();
        }
        self.snap_nonbasic_into_bounds();
        self.recompute_x();
        if !self.is_dual_feasible() {
            match self.primal_phase1() {
                LpStatus::Optimal => {}
                other => return other,
            }
            return self.primal_phase2();
        }
        match self.dual_loop() {
            LpStatus::Optimal => self.primal_phase2(),
            other => other,
        }
    }

    /// Keep nonbasic statuses pointing at finite bounds after bound edits.
    fn snap_nonbasic_into_bounds(&mut self) {
        for col in 0..self.lp.ncols() {
            if self.vstat[col] == VStat::Basic {
                continue;
            }
            let (l, u) = (self.lp.lower[col], self.lp.upper[col]);
            self.vstat[col] = match self.vstat[col] {
                VStat::AtLower if l.is_finite() => VStat::AtLower,
                VStat::AtUpper if u.is_finite() => VStat::AtUpper,
                VStat::Free if !l.is_finite() && !u.is_finite() => VStat::Free,
                _ => self.default_nonbasic(col),
            };
        }
    }

    // ---- linear algebra ---------------------------------------------------

    fn refactor(&mut self) {
        let m = self.lp.nrows();
        let mut mat = vec![0.0; m * m];
        for (r, &col) in self.basic.iter().enumerate() {
            for &(row, val) in &self.lp.cols[col] {
                mat[row as usize * m + r] = val;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = mat[k * m + k].abs();
            for r in k + 1..m {
                let v = mat[r * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                // Singular basis (numerical trouble): restart from all-slack.
                self.basic = (0..m).map(|r| self.lp.slack_of_row[r] as usize).collect();
                for col in 0..self.lp.ncols() {
                    if self.vstat[col] == VStat::Basic {
                        self.vstat[col] = self.default_nonbasic(col);
                    }
                }
                for &col in &self.basic {
                    self.vstat[col] = VStat::Basic;
                }
                return self.refactor();
            }
            if piv_row != k {
                for c in 0..m {
                    mat.swap(k * m + c, piv_row * m + c);
                    inv.swap(k * m + c, piv_row * m + c);
                }
            }
            let p = mat[k * m + k];
            let pinv = 1.0 / p;
            for c in 0..m {
                mat[k * m + c] *= pinv;
                inv[k * m + c] *= pinv;
            }
            for r in 0..m {
                if r == k {
                    continue;
                }
                let f = mat[r * m + k];
                if f != 0.0 {
                    for c in 0..m {
                        mat[r * m + c] -= f * mat[k * m + c];
                        inv[r * m + c] -= f * inv[k * m + c];
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;
    }

    fn recompute_x(&mut self) {
        let m = self.lp.nrows();
        let mut r = self.lp.rhs.clone();
        for col in 0..self.lp.ncols() {
            if self.vstat[col] == VStat::Basic {
                continue;
            }
            let v = self.nonbasic_value(col);
            self.x[col] = v;
            if v != 0.0 {
                for &(row, a) in &self.lp.cols[col] {
                    r[row as usize] -= a * v;
                }
            }
        }
        for (i, &col) in self.basic.iter().enumerate() {
            let row = &self.binv[i * m..(i + 1) * m];
            let mut acc = 0.0;
            for k in 0..m {
                acc += row[k] * r[k];
            }
            self.x[col] = acc;
        }
    }

    /// alpha = B^-1 a_col
    fn ftran(&self, col: usize) -> Vec<f64> {
        let m = self.lp.nrows();
        let mut alpha = vec![0.0; m];
        for &(row, val) in &self.lp.cols[col] {
            let r = row as usize;
            for i in 0..m {
                alpha[i] += self.binv[i * m + r] * val;
            }
        }
        alpha
    }

    /// y' = cb' B^-1
    fn btran_costs(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.lp.nrows();
        let mut y = vec![0.0; m];
        for (i, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for k in 0..m {
                    y[k] += c * row[k];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, col: usize, y: &[f64]) -> f64 {
        let mut d = self.lp.cost[col];
        for &(row, val) in &self.lp.cols[col] {
            d -= y[row as usize] * val;
        }
        d
    }

    fn pivot(&mut self, leave_row: usize, enter_col: usize, alpha: &[f64]) {
        let m = self.lp.nrows();
        let pa = alpha[leave_row];
        debug_assert!(pa.abs() > PIVOT_TOL);
        let (head, tail) = self.binv.split_at_mut(leave_row * m);
        let (prow, rest) = tail.split_at_mut(m);
        let pa_inv = 1.0 / pa;
        for v in prow.iter_mut() {
            *v *= pa_inv;
        }
        for (i, chunk) in head.chunks_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (dst, &p) in chunk.iter_mut().zip(prow.iter()) {
                    *dst -= f * p;
                }
            }
        }
        for (off, chunk) in rest.chunks_mut(m).enumerate() {
            let f = alpha[leave_row + 1 + off];
            if f != 0.0 {
                for (dst, &p) in chunk.iter_mut().zip(prow.iter()) {
                    *dst -= f * p;
                }
            }
        }
        self.basic[leave_row] = enter_col;
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor();
            self.recompute_x();
        }
    }

    fn total_infeasibility(&self) -> f64 {
        let mut t = 0.0;
        for &col in &self.basic {
            let v = self.x[col];
            if v < self.lp.lower[col] {
                t += self.lp.lower[col] - v;
            } else if v > self.lp.upper[col] {
                t += v - self.lp.upper[col];
            }
        }
        t
    }

    // ---- pricing ------------------------------------------------------

    /// Pick the entering column given reduced costs via `y` and the cost
    /// vector already folded into `reduced` closure semantics. Applies
    /// Dantzig's rule, or Bland's (first eligible) when `self.bland`.
    fn price(&self, y: &[f64], phase1: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for col in 0..self.lp.ncols() {
            if self.vstat[col] == VStat::Basic || self.lp.lower[col] == self.lp.upper[col] {
                continue;
            }
            let d = if phase1 {
                // phase-1 nonbasic costs are all zero
                let mut d = 0.0;
                for &(row, val) in &self.lp.cols[col] {
                    d -= y[row as usize] * val;
                }
                d
            } else {
                self.reduced_cost(col, y)
            };
            let cand = match self.vstat[col] {
                VStat::AtLower => (d < -COST_TOL).then_some((col, 1.0, -d)),
                VStat::AtUpper => (d > COST_TOL).then_some((col, -1.0, d)),
                VStat::Free => {
                    if d < -COST_TOL {
                        Some((col, 1.0, -d))
                    } else if d > COST_TOL {
                        Some((col, -1.0, d))
                    } else {
                        None
                    }
                }
                VStat::Basic => None,
            };
            if let Some((c, dir, score)) = cand {
                if self.bland {
                    return Some((c, dir));
                }
                if best.map_or(true, |(_, _, bs)| score > bs) {
                    best = Some((c, dir, score));
                }
            }
        }
        best.map(|(c, dir, _)| (c, dir))
    }

    // ---- ratio tests ----------------------------------------------------

    /// Phase-2 ratio test: all basics are within bounds and stay there.
    fn ratio_phase2(&self, dir: f64, alpha: &[f64], enter_col: usize) -> Option<Ratio> {
        let range = self.lp.upper[enter_col] - self.lp.lower[enter_col];
        let mut step = if range.is_finite() {
            range
        } else {
            f64::INFINITY
        };
        let mut leave: Option<(usize, f64)> = None;
        for (i, &col) in self.basic.iter().enumerate() {
            let g = -dir * alpha[i];
            if g.abs() <= PIVOT_TOL {
                continue;
            }
            let v = self.x[col];
            let cap = if g > 0.0 {
                let u = self.lp.upper[col];
                if !u.is_finite() {
                    continue;
                }
                ((u - v) / g).max(0.0)
            } else {
                let l = self.lp.lower[col];
                if !l.is_finite() {
                    continue;
                }
                ((l - v) / g).max(0.0)
            };
            if cap < step - RATIO_TIE {
                step = cap;
                leave = Some((i, alpha[i].abs()));
            } else if let Some((_, la)) = leave {
                if cap <= step + RATIO_TIE && alpha[i].abs() > la {
                    leave = Some((i, alpha[i].abs()));
                }
            }
        }
        if !step.is_finite() {
            None // unbounded direction
        } else {
            Some(Ratio { step, leave })
        }
    }

    /// Phase-1 ratio test: infeasible basics are capped at their violated
    /// bound when moving toward it and unrestricted when moving away (the
    /// composite cost stays linear on the step).
    fn ratio_phase1(&self, dir: f64, alpha: &[f64], enter_col: usize) -> Option<Ratio> {
        let range = self.lp.upper[enter_col] - self.lp.lower[enter_col];
        let mut step = if range.is_finite() {
            range
        } else {
            f64::INFINITY
        };
        let mut leave: Option<(usize, f64)> = None;
        for (i, &col) in self.basic.iter().enumerate() {
            let g = -dir * alpha[i];
            if g.abs() <= PIVOT_TOL {
                continue;
            }
            let v = self.x[col];
            let (l, u) = (self.lp.lower[col], self.lp.upper[col]);
            let cap = if v < l - FEAS_TOL {
                if g > 0.0 {
                    (l - v) / g
                } else {
                    continue;
                }
            } else if v > u + FEAS_TOL {
                if g < 0.0 {
                    (u - v) / g
                } else {
                    continue;
                }
            } else if g > 0.0 {
                if !u.is_finite() {
                    continue;
                }
                ((u - v) / g).max(0.0)
            } else {
                if !l.is_finite() {
                    continue;
                }
                ((l - v) / g).max(0.0)
            };
            if cap < step - RATIO_TIE {
                step = cap;
                leave = Some((i, alpha[i].abs()));
            } else if let Some((_, la)) = leave {
                if cap <= step + RATIO_TIE && alpha[i].abs() > la {
                    leave = Some((i, alpha[i].abs()));
                }
            }
        }
        if !step.is_finite() {
            None
        } else {
            Some(Ratio { step, leave })
        }
    }

    fn apply_step(&mut self, enter_col: usize, dir: f64, ratio: Ratio, alpha: &[f64]) {
        if ratio.step <= DEGEN_STEP {
            self.degen_streak += 1;
            if self.degen_streak > BLAND_TRIGGER {
                self.bland = true;
            }
        } else {
            self.degen_streak = 0;
            self.bland = false;
        }
        self.x[enter_col] += dir * ratio.step;
        for (i, &col) in self.basic.iter().enumerate() {
            self.x[col] -= dir * ratio.step * alpha[i];
        }
        match ratio.leave {
            Some((row, _)) => {
                let leave_col = self.basic[row];
                let v = self.x[leave_col];
                let (l, u) = (self.lp.lower[leave_col], self.lp.upper[leave_col]);
                // park exactly on the bound the variable ran into
                let to_lower = match (l.is_finite(), u.is_finite()) {
                    (true, true) => (v - l).abs() <= (v - u).abs(),
                    (true, false) => true,
                    (false, true) => false,
                    (false, false) => true, // cannot happen for a blocking row
                };
                if to_lower {
                    self.x[leave_col] = l;
                    self.vstat[leave_col] = VStat::AtLower;
                } else {
                    self.x[leave_col] = u;
                    self.vstat[leave_col] = VStat::AtUpper;
                }
                self.vstat[enter_col] = VStat::Basic;
                self.pivot(row, enter_col, alpha);
            }
            None => {
                // bound flip across the entering variable's own range
                self.vstat[enter_col] = match self.vstat[enter_col] {
                    VStat::AtLower => VStat::AtUpper,
                    VStat::AtUpper => VStat::AtLower,
                    s => s,
                };
                let target = match self.vstat[enter_col] {
                    VStat::AtLower => self.lp.lower[enter_col],
                    VStat::AtUpper => self.lp.upper[enter_col],
                    _ => self.x[enter_col],
                };
                if target.is_finite() {
                    self.x[enter_col] = target;
                }
            }
        }
    }

    // ---- phase 1 / phase 2 drivers ---------------------------------------

    fn primal_phase1(&mut self) -> LpStatus {
        self.bland = false;
        self.degen_streak = 0;
        let m = self.lp.nrows();
        for _ in 0..self.max_iters {
            if self.total_infeasibility() <= FEAS_TOL {
                return LpStatus::Optimal;
            }
            let mut cb = vec![0.0; m];
            for (i, &col) in self.basic.iter().enumerate() {
                let v = self.x[col];
                if v < self.lp.lower[col] - FEAS_TOL {
                    cb[i] = -1.0;
                } else if v > self.lp.upper[col] + FEAS_TOL {
                    cb[i] = 1.0;
                }
            }
            let y = self.btran_costs(&cb);
            let Some((enter_col, dir)) = self.price(&y, true) else {
                return LpStatus::Infeasible;
            };
            let alpha = self.ftran(enter_col);
            let Some(ratio) = self.ratio_phase1(dir, &alpha, enter_col) else {
                // an unbounded improving ray cannot reduce a nonnegative
                // infeasibility sum forever; treat as numerical stall
                return LpStatus::IterLimit;
            };
            self.apply_step(enter_col, dir, ratio, &alpha);
        }
        LpStatus::IterLimit
    }

    fn primal_phase2(&mut self) -> LpStatus {
        self.bland = false;
        self.degen_streak = 0;
        for _ in 0..self.max_iters {
            let cb: Vec<f64> = self.basic.iter().map(|&c| self.lp.cost[c]).collect();
            let y = self.btran_costs(&cb);
            let Some((enter_col, dir)) = self.price(&y, false) else {
                return LpStatus::Optimal;
            };
            let alpha = self.ftran(enter_col);
            let Some(ratio) = self.ratio_phase2(dir, &alpha, enter_col) else {
                return LpStatus::Unbounded;
            };
            self.apply_step(enter_col, dir, ratio, &alpha);
        }
        LpStatus::IterLimit
    }

    // ---- dual simplex -----------------------------------------------------

    fn is_dual_feasible(&self) -> bool {
        let cb: Vec<f64> = self.basic.iter().map(|&c| self.lp.cost[c]).collect();
        let y = self.btran_costs(&cb);
        for col in 0..self.lp.ncols() {
            if self.vstat[col] == VStat::Basic || self.lp.lower[col] == self.lp.upper[col] {
                continue;
            }
            let d = self.reduced_cost(col, &y);
            let ok = match self.vstat[col] {
                VStat::AtLower => d >= -1e-7,
                VStat::AtUpper => d <= 1e-7,
                VStat::Free => d.abs() <= 1e-7,
                VStat::Basic => true,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn dual_loop(&mut self) -> LpStatus {
        let m = self.lp.nrows();
        for _ in 0..self.max_iters {
            let mut leave: Option<(usize, f64, bool)> = None; // (row, violation, below)
            for (i, &col) in self.basic.iter().enumerate() {
                let v = self.x[col];
                let below = self.lp.lower[col] - v;
                let above = v - self.lp.upper[col];
                if below > FEAS_TOL && leave.map_or(true, |(_, w, _)| below > w) {
                    leave = Some((i, below, true));
                }
                if above > FEAS_TOL && leave.map_or(true, |(_, w, _)| above > w) {
                    leave = Some((i, above, false));
                }
            }
            let Some((leave_row, _, below)) = leave else {
                return LpStatus::Optimal;
            };
            let sgn = if below { 1.0 } else { -1.0 };
            let rho: Vec<f64> = self.binv[leave_row * m..(leave_row + 1) * m]
                .iter()
                .map(|&v| v * sgn)
                .collect();
            let cb: Vec<f64> = self.basic.iter().map(|&c| self.lp.cost[c]).collect();
            let y = self.btran_costs(&cb);
            let mut best: Option<(usize, f64, f64)> = None; // (col, ratio, |alpha_r|)
            for col in 0..self.lp.ncols() {
                if self.vstat[col] == VStat::Basic || self.lp.lower[col] == self.lp.upper[col] {
                    continue;
                }
                let mut ar = 0.0;
                for &(row, val) in &self.lp.cols[col] {
                    ar += rho[row as usize] * val;
                }
                if ar.abs() <= PIVOT_TOL {
                    continue;
                }
                let eligible = match self.vstat[col] {
                    VStat::AtLower => ar < 0.0,
                    VStat::AtUpper => ar > 0.0,
                    VStat::Free => true,
                    VStat::Basic => false,
                };
                if !eligible {
                    continue;
                }
                let d = self.reduced_cost(col, &y);
                let ratio = (d / ar).abs();
                let better = match best {
                    None => true,
                    Some((_, br, ba)) => {
                        ratio < br - RATIO_TIE || (ratio <= br + RATIO_TIE && ar.abs() > ba)
                    }
                };
                if better {
                    best = Some((col, ratio, ar.abs()));
                }
            }
            let Some((enter_col, _, _)) = best else {
                return LpStatus::Infeasible;
            };
            let alpha = self.ftran(enter_col);
            if alpha[leave_row].abs() <= PIVOT_TOL {
                return LpStatus::IterLimit;
            }
            let leave_col = self.basic[leave_row];
            self.vstat[leave_col] = if below {
                VStat::AtLower
            } else {
                VStat::AtUpper
            };
            self.x[leave_col] = if below {
                self.lp.lower[leave_col]
            } else {
                self.lp.upper[leave_col]
            };
            self.vstat[enter_col] = VStat::Basic;
            self.pivot(leave_row, enter_col, &alpha);
            self.recompute_x();
        }
        LpStatus::IterLimit
    }
}
