use opt_ir::ProblemIR;
use opt_solve::SolveOptions;
use serde::{Deserialize, Serialize};
use transport::{inproc_pair, tcp_pair, Endpoint, TransportAudit};

use crate::agents::{PdnAgent, SideResult, TnAgent, TnSideResult};
use crate::state::RunTrace;
use crate::{AlgoParams, CoordError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgoKind {
    /// Adaptive inner loop (the main algorithm).
    #[serde(rename = "vils")]
    Vils,
    /// Fixed inner-loop baseline; pass count from `AlgoParams::inner_loop_fixed`.
    #[serde(rename = "sdmgs")]
    Sdmgs,
    #[serde(rename = "admm")]
    Admm,
}

impl std::fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AlgoKind::Vils => "vils",
            AlgoKind::Sdmgs => "sdmgs",
            AlgoKind::Admm => "admm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportKind {
    #[serde(rename = "inproc")]
    InProc,
    #[serde(rename = "tcp")]
    Tcp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Converged,
    NotConverged,
}

/// Everything a run produces: solutions, bounds, trace, and both audits.
#[derive(Debug, Clone)]
pub struct CoordOutcome {
    pub status: RunStatus,
    pub outer_iterations: usize,
    pub total_inner: usize,
    /// Original objectives at the final inner solutions.
    pub objective_p: f64,
    pub objective_v: f64,
    pub p_d: Vec<f64>,
    pub p_t: Vec<f64>,
    pub z: Vec<f64>,
    pub phi_hat_sum: f64,
    pub phi_check_sum: f64,
    pub gap: f64,
    pub residual_inf: f64,
    pub trace: RunTrace,
    pub pdn_values: Vec<f64>,
    pub tn_values: Vec<f64>,
    pub lambda_p: Vec<f64>,
    pub lambda_v: Vec<f64>,
    pub flagged: bool,
    pub pdn_audit: TransportAudit,
    pub tn_audit: TransportAudit,
}

impl CoordOutcome {
    pub fn objective(&self) -> f64 {
        self.objective_p + self.objective_v
    }
}

/// Drive one algorithm over the two subproblems, all cross-operator traffic
/// going through the chosen transport. Returns after both agents join.
pub fn run_coordination(
    algo: AlgoKind,
    pdn_ir: &ProblemIR,
    tn_ir: &ProblemIR,
    params: &AlgoParams,
    opts: &SolveOptions,
    transport: TransportKind,
) -> Result<CoordOutcome, CoordError> {
    params.validate()?;
    let np = pdn_ir
        .boundary_vars
        .get("p_D")
        .map(|g| g.len())
        .unwrap_or(0);
    let nv = tn_ir
        .boundary_vars
        .get("p_T")
        .map(|g| g.len())
        .unwrap_or(0);
    if np != nv || np == 0 {
        return Err(CoordError::BoundaryMismatch { pdn: np, tn: nv });
    }
    if algo == AlgoKind::Sdmgs && params.inner_loop_fixed.is_none() {
        return Err(CoordError::BadParams(
            "the fixed-inner-loop baseline needs inner_loop_fixed".into(),
        ));
    }
    let mut params = params.clone();
    if algo == AlgoKind::Vils {
        params.inner_loop_fixed = None;
    }

    match transport {
        TransportKind::InProc => {
            let (a, b) = inproc_pair();
            run_on(algo, pdn_ir, tn_ir, &params, opts, a, b)
        }
        TransportKind::Tcp => {
            let (a, b) = tcp_pair()?;
            run_on(algo, pdn_ir, tn_ir, &params, opts, a, b)
        }
    }
}

fn run_on<E: Endpoint + 'static>(
    algo: AlgoKind,
    pdn_ir: &ProblemIR,
    tn_ir: &ProblemIR,
    params: &AlgoParams,
    opts: &SolveOptions,
    pdn_ep: E,
    tn_ep: E,
) -> Result<CoordOutcome, CoordError> {
    let pdn = PdnAgent::new(pdn_ir.clone(), params.clone(), opts.clone());
    let tn = TnAgent::new(tn_ir.clone(), params.clone(), opts.clone());
    let (pdn_res, tn_res) = std::thread::scope(
        |s| -> (Result<SideResult, CoordError>, Result<TnSideResult, CoordError>) {
            let ph = s.spawn(move || {
                let mut ep = pdn_ep;
                match algo {
                    AlgoKind::Admm => pdn.run_admm(&mut ep),
                    _ => pdn.run_bounds(&mut ep),
                }
            });
            let th = s.spawn(move || {
                let mut ep = tn_ep;
                match algo {
                    AlgoKind::Admm => tn.run_admm(&mut ep),
                    _ => tn.run_bounds(&mut ep),
                }
            });
            let p = ph.join().unwrap_or(Err(CoordError::AgentPanic));
            let t = th.join().unwrap_or(Err(CoordError::AgentPanic));
            (p, t)
        },
    );
    // an error on one side usually tears down the peer's socket too; report
    // the root cause with priority to non-transport errors
    let (p, t) = match (pdn_res, tn_res) {
        (Ok(p), Ok(t)) => (p, t),
        (Err(e), Ok(_)) | (Ok(_), Err(e)) => return Err(e),
        (Err(p), Err(t)) => {
            return Err(match (&p, &t) {
                (CoordError::Transport(_), _) => t,
                _ => p,
            })
        }
    };

    let residual_inf = p
        .boundary
        .iter()
        .zip(&t.side.boundary)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let status = if p.converged_at.is_some() && t.side.converged_at.is_some() {
        RunStatus::Converged
    } else {
        RunStatus::NotConverged
    };
    Ok(CoordOutcome {
        status,
        outer_iterations: t.trace.rows.len(),
        total_inner: t.trace.total_inner(),
        objective_p: p.objective,
        objective_v: t.side.objective,
        p_d: p.boundary,
        p_t: t.side.boundary.clone(),
        z: t.z.clone(),
        phi_hat_sum: p.phi_hat + t.side.phi_hat,
        phi_check_sum: p.phi_check + t.side.phi_check,
        gap: (p.phi_hat + t.side.phi_hat) - (p.phi_check + t.side.phi_check),
        residual_inf,
        trace: t.trace,
        pdn_values: p.values,
        tn_values: t.side.values,
        lambda_p: p.lambda,
        lambda_v: t.side.lambda,
        flagged: p.flagged_micp || t.side.flagged_micp,
        pdn_audit: p.audit,
        tn_audit: t.side.audit,
    })
}
