use std::time::Instant;

use opt_ir::{LinConstraint, LinExpr, ProblemIR, Sense, Solution, SolveStatus, Sos2Set, VarKind};
use opt_solve::{solve_micp_linear, solve_qp, SolveOptions};
use transport::{BoundaryMessage, Endpoint, Payload, Phase, Sender, TransportAudit};

use crate::state::{RunTrace, StepType, TraceRow};
use crate::{AlgoParams, CoordError};

/// Consensus update: the unique minimizer of
/// `||z - p_D||^2 + ||p_T - z||^2` is the elementwise average.
pub fn z_update(p_d: &[f64], p_t: &[f64]) -> Result<Vec<f64>, CoordError> {
    if p_d.len() != p_t.len() {
        return Err(CoordError::BoundaryMismatch {
            pdn: p_d.len(),
            tn: p_t.len(),
        });
    }
    Ok(p_d.iter().zip(p_t).map(|(a, b)| 0.5 * (a + b)).collect())
}

/// Quality check on the intermediate lower bound. At an exact inner fixed
/// point the upper bound and the shifted-multiplier lower bound coincide, so
/// that comparison gets a scale-aware epsilon; the lower comparison stays
/// exact, which keeps the stored lower-bound sum non-decreasing.
fn quality_forward(hat_sum: f64, tilde_sum: f64, check_sum: f64) -> bool {
    let eps = 1e-9 * hat_sum.abs().max(tilde_sum.abs()).max(1.0);
    hat_sum >= tilde_sum - eps && tilde_sum >= check_sum
}

fn norm_sq(res: impl Iterator<Item = f64>) -> f64 {
    res.map(|r| r * r).sum()
}

/// What one operator hands back after a run.
#[derive(Debug, Clone)]
pub struct SideResult {
    pub values: Vec<f64>,
    /// Original (unaugmented) objective at the final inner solution.
    pub objective: f64,
    pub boundary: Vec<f64>,
    pub lambda: Vec<f64>,
    pub phi_check: f64,
    pub phi_hat: f64,
    pub converged_at: Option<usize>,
    /// A lower-bound solve hit its node budget somewhere (bound still valid).
    pub flagged_micp: bool,
    pub audit: TransportAudit,
}

#[derive(Debug, Clone)]
pub struct TnSideResult {
    pub side: SideResult,
    pub trace: RunTrace,
    pub z: Vec<f64>,
    pub last_p_d: Vec<f64>,
}

fn boundary_of(ir: &ProblemIR, label: &str) -> Result<Vec<opt_ir::VarId>, CoordError> {
    ir.boundary_vars
        .get(label)
        .cloned()
        .ok_or_else(|| CoordError::BadParams(format!("IR lacks boundary group {label:?}")))
}

fn values_of(sol: &Solution, group: &[opt_ir::VarId]) -> Vec<f64> {
    group.iter().map(|v| sol.values[v.index()]).collect()
}

fn expect_solved(
    sol: &Solution,
    side: &'static str,
    what: &str,
    k: usize,
    j: usize,
) -> Result<(), CoordError> {
    match sol.status {
        SolveStatus::Optimal => Ok(()),
        other => Err(CoordError::Subproblem {
            side,
            what: format!("{what} ended {other:?}"),
            k,
            j,
        }),
    }
}

// ---------------------------------------------------------------------------
// Power-side agent
// ---------------------------------------------------------------------------

pub struct PdnAgent {
    pub ir: ProblemIR,
    pub params: AlgoParams,
    pub opts: SolveOptions,
}

impl PdnAgent {
    pub fn new(ir: ProblemIR, params: AlgoParams, opts: SolveOptions) -> Self {
        Self { ir, params, opts }
    }

    fn send<E: Endpoint>(
        &self,
        ep: &mut E,
        phase: Phase,
        k: usize,
        j: usize,
        payload: Payload,
    ) -> Result<(), CoordError> {
        ep.send(&BoundaryMessage {
            sender: Sender::Pdso,
            phase,
            outer_k: k as u32,
            inner_j: j as u32,
            payload,
        })?;
        Ok(())
    }

    /// Run the bound-driven scheme (adaptive or fixed inner loop is decided
    /// by the traffic side; this side just follows the continue flags).
    pub fn run_bounds<E: Endpoint>(&self, ep: &mut E) -> Result<SideResult, CoordError> {
        self.params.validate()?;
        let gamma = self.params.gamma;
        let group = boundary_of(&self.ir, "p_D")?;
        let nb = group.len();
        let zeros = vec![0.0; nb];

        // initial discrete fixing: one independent solve at zero multipliers
        let init = solve_micp_linear(&self.ir, &self.opts)?;
        expect_solved(&init, "PDN", "initial fixing solve", 0, 0)?;
        let mut plan = self.ir.fix_plan_from(&init.values);

        let mut lambda = zeros.clone();
        let mut z = zeros.clone();
        let mut phi_check = self.params.phi0_p;
        let mut flagged = false;
        let mut last: Option<(Solution, Vec<f64>, f64)> = None; // (sol, p_d, lr)
        let mut converged_at = None;
        let mut phi_hat = f64::NAN;

        for k in 1..=self.params.max_outer {
            let fixed = self.ir.apply_fix_plan(&plan)?;
            let mut j = 0;
            let (mut p_d, mut lr_p);
            loop {
                j += 1;
                let aug =
                    model_pdn::attach_augmented_objective_pdn(&fixed, &lambda, &z, gamma)?;
                let sol = solve_qp(&aug, &self.opts)?;
                expect_solved(&sol, "PDN", "augmented subproblem", k, j)?;
                p_d = values_of(&sol, &group);
                lr_p = sol.objective;
                self.send(
                    ep,
                    Phase::BoundaryReport,
                    k,
                    j,
                    Payload::Boundary {
                        power_kw: p_d.clone(),
                        lagrangian: lr_p,
                    },
                )?;
                let zmsg = ep.recv(Phase::ZBroadcast, k as u32, j as u32)?;
                let Payload::Z {
                    z_kw,
                    continue_inner,
                } = zmsg.payload
                else {
                    unreachable!("phase checked by transport");
                };
                z = z_kw;
                last = Some((sol, p_d.clone(), lr_p));
                if !continue_inner {
                    break;
                }
            }
            let (_, p_d, lr_p) = last.as_ref().unwrap();
            phi_hat = lr_p
                + gamma / 2.0 * norm_sq(z.iter().zip(p_d.iter()).map(|(zi, pi)| zi - pi));

            // upper-bound exchange and convergence check
            self.send(
                ep,
                Phase::BoundReport,
                k,
                0,
                Payload::Bounds {
                    phi_hat,
                    phi_tilde: None,
                    phi_check,
                },
            )?;
            let peer = ep.recv(Phase::BoundReport, k as u32, 0)?;
            let Payload::Bounds {
                phi_hat: hat_v,
                phi_check: check_v,
                ..
            } = peer.payload
            else {
                unreachable!();
            };
            let gap = (phi_hat + hat_v) - (phi_check + check_v);
            if gap <= self.params.eps {
                let ep_msg = ep.recv(Phase::BinaryEpoch, k as u32, 0)?;
                let Payload::Epoch { stop, .. } = ep_msg.payload else {
                    unreachable!();
                };
                if !stop {
                    return Err(CoordError::DecisionMismatch {
                        k,
                        local: "stop".into(),
                        peer: "continue".into(),
                    });
                }
                converged_at = Some(k);
                break;
            }

            // intermediate lower bound at the shifted multiplier
            let shifted: Vec<f64> = lambda
                .iter()
                .zip(z.iter().zip(p_d.iter()))
                .map(|(l, (zi, pi))| l + gamma * (zi - pi))
                .collect();
            let low_ir =
                model_pdn::attach_augmented_objective_pdn(&self.ir, &shifted, &zeros, 0.0)?;
            let low = solve_micp_linear(
                &low_ir,
                &SolveOptions {
                    hint: Some(plan.clone()),
                    ..self.opts.clone()
                },
            )?;
            let tilde = match low.status {
                SolveStatus::Optimal => low.objective,
                SolveStatus::IterationLimit => {
                    flagged = true;
                    low.bound
                }
                other => {
                    return Err(CoordError::Subproblem {
                        side: "PDN",
                        what: format!("lower-bound solve ended {other:?}"),
                        k,
                        j: 0,
                    })
                }
            };
            let plan_next = low_ir.fix_plan_from(&low.values);

            self.send(
                ep,
                Phase::BoundReport,
                k,
                1,
                Payload::Bounds {
                    phi_hat,
                    phi_tilde: Some(tilde),
                    phi_check,
                },
            )?;
            let peer2 = ep.recv(Phase::BoundReport, k as u32, 1)?;
            let Payload::Bounds {
                phi_tilde: Some(tilde_v),
                ..
            } = peer2.payload
            else {
                return Err(CoordError::Transport(transport::TransportError::Protocol {
                    expected: "bounds with phi_tilde".into(),
                    got: "bounds without phi_tilde".into(),
                }));
            };
            let forward =
                quality_forward(phi_hat + hat_v, tilde + tilde_v, phi_check + check_v);
            let ep_msg = ep.recv(Phase::BinaryEpoch, k as u32, 1)?;
            let Payload::Epoch {
                forward: peer_forward,
                stop,
            } = ep_msg.payload
            else {
                unreachable!();
            };
            if stop || peer_forward != forward {
                return Err(CoordError::DecisionMismatch {
                    k,
                    local: format!("forward={forward}"),
                    peer: format!("forward={peer_forward}, stop={stop}"),
                });
            }
            if forward {
                for (l, (zi, pi)) in lambda.iter_mut().zip(z.iter().zip(p_d.iter())) {
                    *l += gamma * (zi - pi);
                }
                phi_check = tilde;
            }
            plan = plan_next;
        }

        let (sol, p_d, _) = last.ok_or(CoordError::BadParams("no iterations ran".into()))?;
        Ok(SideResult {
            objective: self.ir.objective_value(&sol.values),
            values: sol.values,
            boundary: p_d,
            lambda,
            phi_check,
            phi_hat,
            converged_at,
            flagged_micp: flagged,
            audit: ep.take_audit(),
        })
    }

    /// Consensus-ADMM baseline (scaled form, zero-initialized duals; the
    /// scaled-dual average vanishes, so the consensus update needs only the
    /// boundary vectors).
    pub fn run_admm<E: Endpoint>(&self, ep: &mut E) -> Result<SideResult, CoordError> {
        self.params.validate()?;
        let rho = self.params.admm_rho;
        let group = boundary_of(&self.ir, "p_D")?;
        let nb = group.len();
        let mut u = vec![0.0; nb];
        let mut z = vec![0.0; nb];
        let zeros = vec![0.0; nb];
        let mut last: Option<(Solution, Vec<f64>)> = None;
        let mut converged_at = None;

        for k in 1..=self.params.max_outer {
            let target: Vec<f64> = z.iter().zip(&u).map(|(zi, ui)| zi - ui).collect();
            let sol = if self.ir.has_discrete() {
                let pen = admm_penalized(&self.ir, "p_D", &target, rho)?;
                solve_micp_linear(&pen, &self.opts)?
            } else {
                let aug =
                    model_pdn::attach_augmented_objective_pdn(&self.ir, &zeros, &target, rho)?;
                solve_qp(&aug, &self.opts)?
            };
            expect_solved(&sol, "PDN", "ADMM subproblem", k, 1)?;
            let p_d = values_of(&sol, &group);
            self.send(
                ep,
                Phase::BoundaryReport,
                k,
                1,
                Payload::Boundary {
                    power_kw: p_d.clone(),
                    lagrangian: self.ir.objective_value(&sol.values),
                },
            )?;
            let zmsg = ep.recv(Phase::ZBroadcast, k as u32, 1)?;
            let Payload::Z {
                z_kw,
                continue_inner,
            } = zmsg.payload
            else {
                unreachable!();
            };
            for ((ui, pi), zi) in u.iter_mut().zip(&p_d).zip(&z_kw) {
                *ui += pi - zi;
            }
            z = z_kw;
            last = Some((sol, p_d));
            if !continue_inner {
                converged_at = Some(k);
                break;
            }
        }
        let (sol, p_d) = last.ok_or(CoordError::BadParams("no iterations ran".into()))?;
        Ok(SideResult {
            objective: self.ir.objective_value(&sol.values),
            values: sol.values,
            boundary: p_d,
            lambda: u.iter().map(|ui| ui * rho).collect(),
            phi_check: f64::NAN,
            phi_hat: f64::NAN,
            converged_at,
            flagged_micp: false,
            audit: ep.take_audit(),
        })
    }
}

// ---------------------------------------------------------------------------
// Traffic-side agent (owns the consensus update and iteration closure)
// ---------------------------------------------------------------------------

pub struct TnAgent {
    pub ir: ProblemIR,
    pub params: AlgoParams,
    pub opts: SolveOptions,
}

impl TnAgent {
    pub fn new(ir: ProblemIR, params: AlgoParams, opts: SolveOptions) -> Self {
        Self { ir, params, opts }
    }

    fn send<E: Endpoint>(
        &self,
        ep: &mut E,
        phase: Phase,
        k: usize,
        j: usize,
        payload: Payload,
    ) -> Result<(), CoordError> {
        ep.send(&BoundaryMessage {
            sender: Sender::Tnc,
            phase,
            outer_k: k as u32,
            inner_j: j as u32,
            payload,
        })?;
        Ok(())
    }

    pub fn run_bounds<E: Endpoint>(&self, ep: &mut E) -> Result<TnSideResult, CoordError> {
        self.params.validate()?;
        let gamma = self.params.gamma;
        let group = boundary_of(&self.ir, "p_T")?;
        let nb = group.len();
        let zeros = vec![0.0; nb];

        let init = solve_micp_linear(&self.ir, &self.opts)?;
        expect_solved(&init, "TN", "initial fixing solve", 0, 0)?;
        let mut plan = self.ir.fix_plan_from(&init.values);

        let mut lambda = zeros.clone();
        let mut z = zeros.clone();
        let mut phi_check = self.params.phi0_v;
        let mut flagged = false;
        let mut trace = RunTrace::default();
        let mut last: Option<(Solution, Vec<f64>, f64)> = None;
        let mut last_p_d = zeros.clone();
        let mut converged_at = None;
        let mut phi_hat = f64::NAN;

        for k in 1..=self.params.max_outer {
            let t0 = Instant::now();
            let fixed = self.ir.apply_fix_plan(&plan)?;
            let mut lr_values = vec![0.0];
            let mut j = 0;
            let (mut p_t, mut lr_v, mut lr_p);
            loop {
                j += 1;
                let aug = model_tn::attach_augmented_objective_tn(&fixed, &lambda, &z, gamma)?;
                let sol = solve_qp(&aug, &self.opts)?;
                expect_solved(&sol, "TN", "augmented subproblem", k, j)?;
                p_t = values_of(&sol, &group);
                lr_v = sol.objective;
                let bm = ep.recv(Phase::BoundaryReport, k as u32, j as u32)?;
                let Payload::Boundary {
                    power_kw,
                    lagrangian,
                } = bm.payload
                else {
                    unreachable!();
                };
                last_p_d = power_kw;
                lr_p = lagrangian;
                let z_new = z_update(&last_p_d, &p_t)?;
                lr_values.push(lr_p + lr_v);
                let delta = (lr_values[lr_values.len() - 1] - lr_values[lr_values.len() - 2])
                    .abs();
                let keep_going = match self.params.inner_loop_fixed {
                    Some(jmax) => j < jmax,
                    None => delta >= self.params.eps_u,
                } && j < self.params.inner_cap;
                if j == self.params.inner_cap
                    && self.params.inner_loop_fixed.is_none()
                    && delta >= self.params.eps_u
                {
                    trace
                        .warnings
                        .push(format!("inner loop capped at {} passes (outer {k})", j));
                }
                self.send(
                    ep,
                    Phase::ZBroadcast,
                    k,
                    j,
                    Payload::Z {
                        z_kw: z_new.clone(),
                        continue_inner: keep_going,
                    },
                )?;
                z = z_new;
                last = Some((sol, p_t.clone(), lr_v));
                if !keep_going {
                    break;
                }
            }
            let inner_count = j;
            let (_, p_t, lr_v) = last.as_ref().unwrap();
            phi_hat = lr_v
                + gamma / 2.0 * norm_sq(p_t.iter().zip(z.iter()).map(|(pi, zi)| pi - zi));
            let residual_inf = last_p_d
                .iter()
                .zip(p_t.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);

            let peer = ep.recv(Phase::BoundReport, k as u32, 0)?;
            let Payload::Bounds {
                phi_hat: hat_p,
                phi_check: check_p,
                ..
            } = peer.payload
            else {
                unreachable!();
            };
            self.send(
                ep,
                Phase::BoundReport,
                k,
                0,
                Payload::Bounds {
                    phi_hat,
                    phi_tilde: None,
                    phi_check,
                },
            )?;
            let gap = (hat_p + phi_hat) - (check_p + phi_check);
            if gap <= self.params.eps {
                self.send(
                    ep,
                    Phase::BinaryEpoch,
                    k,
                    0,
                    Payload::Epoch {
                        forward: false,
                        stop: true,
                    },
                )?;
                trace.rows.push(TraceRow {
                    k,
                    inner_count,
                    lr_p,
                    lr_v: *lr_v,
                    phi_up: hat_p + phi_hat,
                    phi_low: check_p + phi_check,
                    phi_tilde: f64::NAN,
                    gap,
                    residual_inf,
                    step_type: StepType::Converged,
                    ms: t0.elapsed().as_secs_f64() * 1e3,
                });
                converged_at = Some(k);
                break;
            }

            let shifted: Vec<f64> = lambda
                .iter()
                .zip(p_t.iter().zip(z.iter()))
                .map(|(l, (pi, zi))| l + gamma * (pi - zi))
                .collect();
            let low_ir = model_tn::attach_augmented_objective_tn(&self.ir, &shifted, &zeros, 0.0)?;
            let low = solve_micp_linear(
                &low_ir,
                &SolveOptions {
                    hint: Some(plan.clone()),
                    ..self.opts.clone()
                },
            )?;
            let tilde = match low.status {
                SolveStatus::Optimal => low.objective,
                SolveStatus::IterationLimit => {
                    flagged = true;
                    trace
                        .warnings
                        .push(format!("TN lower-bound solve flagged at outer {k}"));
                    low.bound
                }
                other => {
                    return Err(CoordError::Subproblem {
                        side: "TN",
                        what: format!("lower-bound solve ended {other:?}"),
                        k,
                        j: 0,
                    })
                }
            };
            let plan_next = low_ir.fix_plan_from(&low.values);

            let peer2 = ep.recv(Phase::BoundReport, k as u32, 1)?;
            let Payload::Bounds {
                phi_tilde: Some(tilde_p),
                ..
            } = peer2.payload
            else {
                return Err(CoordError::Transport(transport::TransportError::Protocol {
                    expected: "bounds with phi_tilde".into(),
                    got: "bounds without phi_tilde".into(),
                }));
            };
            self.send(
                ep,
                Phase::BoundReport,
                k,
                1,
                Payload::Bounds {
                    phi_hat,
                    phi_tilde: Some(tilde),
                    phi_check,
                },
            )?;
            let hat_sum = hat_p + phi_hat;
            let tilde_sum = tilde_p + tilde;
            let check_sum = check_p + phi_check;
            let forward = quality_forward(hat_sum, tilde_sum, check_sum);
            self.send(
                ep,
                Phase::BinaryEpoch,
                k,
                1,
                Payload::Epoch {
                    forward,
                    stop: false,
                },
            )?;
            if forward {
                for (l, (pi, zi)) in lambda.iter_mut().zip(p_t.iter().zip(z.iter())) {
                    *l += gamma * (pi - zi);
                }
                phi_check = tilde;
            }
            plan = plan_next;
            // the lower-bound column holds the post-update sum of both sides
            let phi_low_post = if forward {
                tilde_sum
            } else {
                check_p + phi_check
            };
            trace.rows.push(TraceRow {
                k,
                inner_count,
                lr_p,
                lr_v: *lr_v,
                phi_up: hat_sum,
                phi_low: phi_low_post,
                phi_tilde: tilde_sum,
                gap,
                residual_inf,
                step_type: if forward {
                    StepType::Forward
                } else {
                    StepType::Neutral
                },
                ms: t0.elapsed().as_secs_f64() * 1e3,
            });
        }

        let (sol, p_t, _) = last.ok_or(CoordError::BadParams("no iterations ran".into()))?;
        Ok(TnSideResult {
            side: SideResult {
                objective: self.ir.objective_value(&sol.values),
                values: sol.values,
                boundary: p_t,
                lambda,
                phi_check,
                phi_hat,
                converged_at,
                flagged_micp: flagged,
                audit: ep.take_audit(),
            },
            trace,
            z,
            last_p_d,
        })
    }

    pub fn run_admm<E: Endpoint>(&self, ep: &mut E) -> Result<TnSideResult, CoordError> {
        self.params.validate()?;
        let rho = self.params.admm_rho;
        let group = boundary_of(&self.ir, "p_T")?;
        let nb = group.len();
        let mut u = vec![0.0; nb];
        let mut z = vec![0.0; nb];
        let zeros = vec![0.0; nb];
        let mut trace = RunTrace::default();
        let mut last: Option<(Solution, Vec<f64>)> = None;
        let mut last_p_d = zeros.clone();
        let mut converged_at = None;

        for k in 1..=self.params.max_outer {
            let t0 = Instant::now();
            let target: Vec<f64> = z.iter().zip(&u).map(|(zi, ui)| zi - ui).collect();
            let sol = if self.ir.has_discrete() {
                let pen = admm_penalized(&self.ir, "p_T", &target, rho)?;
                solve_micp_linear(&pen, &self.opts)?
            } else {
                let aug = model_tn::attach_augmented_objective_tn(&self.ir, &zeros, &target, rho)?;
                solve_qp(&aug, &self.opts)?
            };
            expect_solved(&sol, "TN", "ADMM subproblem", k, 1)?;
            let p_t = values_of(&sol, &group);
            let f_v = self.ir.objective_value(&sol.values);

            let bm = ep.recv(Phase::BoundaryReport, k as u32, 1)?;
            let Payload::Boundary {
                power_kw,
                lagrangian: f_p,
            } = bm.payload
            else {
                unreachable!();
            };
            last_p_d = power_kw;
            let z_new = z_update(&last_p_d, &p_t)?;
            let primal = (norm_sq(last_p_d.iter().zip(&z_new).map(|(a, b)| a - b))
                + norm_sq(p_t.iter().zip(&z_new).map(|(a, b)| a - b)))
            .sqrt();
            let dual = rho * (2.0 * norm_sq(z_new.iter().zip(&z).map(|(a, b)| a - b))).sqrt();
            let stop = k > 1 && primal <= self.params.eps && dual <= self.params.eps;
            self.send(
                ep,
                Phase::ZBroadcast,
                k,
                1,
                Payload::Z {
                    z_kw: z_new.clone(),
                    continue_inner: !stop,
                },
            )?;
            for ((ui, pi), zi) in u.iter_mut().zip(&p_t).zip(&z_new) {
                *ui += pi - zi;
            }
            let residual_inf = last_p_d
                .iter()
                .zip(&p_t)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            trace.rows.push(TraceRow {
                k,
                inner_count: 1,
                lr_p: f_p,
                lr_v: f_v,
                phi_up: f_p + f_v,
                phi_low: f64::NAN,
                phi_tilde: f64::NAN,
                gap: primal,
                residual_inf,
                step_type: if stop {
                    StepType::Converged
                } else {
                    StepType::Baseline
                },
                ms: t0.elapsed().as_secs_f64() * 1e3,
            });
            z = z_new;
            last = Some((sol, p_t));
            if stop {
                converged_at = Some(k);
                break;
            }
        }
        let (sol, p_t) = last.ok_or(CoordError::BadParams("no iterations ran".into()))?;
        Ok(TnSideResult {
            side: SideResult {
                objective: self.ir.objective_value(&sol.values),
                values: sol.values,
                boundary: p_t,
                lambda: u.iter().map(|ui| ui * rho).collect(),
                phi_check: f64::NAN,
                phi_hat: f64::NAN,
                converged_at,
                flagged_micp: false,
                audit: ep.take_audit(),
            },
            trace,
            z,
            last_p_d,
        })
    }
}

/// ADMM subproblem with discrete structure: the quadratic penalty
/// `(rho/2)||p - target||^2` is piecewise-linearized per boundary variable on
/// an SOS2 grid (16 segments plus the target point), keeping the subproblem a
/// linear-objective MICP.
fn admm_penalized(
    ir: &ProblemIR,
    label: &str,
    target: &[f64],
    rho: f64,
) -> Result<ProblemIR, CoordError> {
    let group = boundary_of(ir, label)?;
    let mut out = ir.clone();
    for (i, &p) in group.iter().enumerate() {
        let spec = &out.vars[p.index()];
        let (lo, hi) = (spec.lower, spec.upper);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(CoordError::BadParams(format!(
                "ADMM penalty needs finite bounds on boundary var {}",
                spec.name
            )));
        }
        let mut bps: Vec<f64> = (0..=16)
            .map(|s| lo + (hi - lo) * s as f64 / 16.0)
            .collect();
        let t = target[i].clamp(lo, hi);
        bps.push(t);
        bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let pen = out.new_var(
            format!("admm_pen[{label}.{i}]"),
            0.0,
            f64::INFINITY,
            VarKind::Continuous,
        )?;
        let mut weights = Vec::with_capacity(bps.len());
        for (s, _) in bps.iter().enumerate() {
            weights.push(out.new_var(
                format!("admm_w[{label}.{i}.{s}]"),
                0.0,
                1.0,
                VarKind::Continuous,
            )?);
        }
        let mut pr = LinExpr::term(p, 1.0);
        let mut qr = LinExpr::term(pen, 1.0);
        let mut sum = LinExpr::zero();
        for (w, &b) in weights.iter().zip(&bps) {
            pr.add_term(*w, -b);
            qr.add_term(*w, -(b - t) * (b - t));
            sum.add_term(*w, 1.0);
        }
        out.push_row(LinConstraint::named(pr, Sense::Eq, 0.0, format!("admm_p[{label}.{i}]")));
        out.push_row(LinConstraint::named(qr, Sense::Eq, 0.0, format!("admm_q[{label}.{i}]")));
        out.push_row(LinConstraint::named(sum, Sense::Eq, 1.0, format!("admm_1[{label}.{i}]")));
        out.sos2.push(Sos2Set {
            members: weights,
            label: format!("admm[{label}.{i}]"),
        });
        out.obj_lin.add_term(pen, rho / 2.0);
    }
    Ok(out)
}
