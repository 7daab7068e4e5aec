use serde::{Deserialize, Serialize};

/// Per-outer-iteration algorithm state, as tracked by each operator for its
/// own side (dual vector, discrete fixing, bounds) plus the shared scalars.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoordinationState {
    pub k: usize,
    /// Consensus vector, kW.
    pub z: Vec<f64>,
    pub lambda_p: Vec<f64>,
    pub lambda_v: Vec<f64>,
    pub phi_low_p: f64,
    pub phi_low_v: f64,
    pub phi_up_p: f64,
    pub phi_up_v: f64,
    /// Lagrangian value set of the current inner loop (first element 0).
    pub lr_values: Vec<f64>,
    pub delta_lr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepType {
    Forward,
    Neutral,
    Converged,
    /// Baseline rows (ADMM) that carry no quality-check verdict.
    Baseline,
}

impl std::fmt::Display for StepType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StepType::Forward => "forward",
            StepType::Neutral => "neutral",
            StepType::Converged => "converged",
            StepType::Baseline => "baseline",
        })
    }
}

/// One outer iteration of the run record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub inner_count: usize,
    pub lr_p: f64,
    pub lr_v: f64,
    /// Upper-bound sum after the inner loop.
    pub phi_up: f64,
    /// Lower-bound sum after this iteration's update.
    pub phi_low: f64,
    /// Intermediate lower-bound sum (NaN when not computed).
    pub phi_tilde: f64,
    pub gap: f64,
    /// Consensus residual, max |p_D - p_T|, kW.
    pub residual_inf: f64,
    pub step_type: StepType,
    pub ms: f64,
}

/// Append-only per-iteration record of a run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub warnings: Vec<String>,
}

impl RunTrace {
    pub fn total_inner(&self) -> usize {
        self.rows.iter().map(|r| r.inner_count).sum()
    }

    /// CSV with the stable column set; wall time is the only
    /// non-deterministic column.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("k,inner_count,lr_p,lr_v,phi_up,phi_low,gap,residual_inf,step_type,ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.k,
                r.inner_count,
                r.lr_p,
                r.lr_v,
                r.phi_up,
                r.phi_low,
                r.gap,
                r.residual_inf,
                r.step_type,
                r.ms
            ));
        }
        out
    }

    /// CSV with the wall-time column stripped, for determinism comparisons.
    pub fn to_csv_without_time(&self) -> String {
        self.to_csv()
            .lines()
            .map(|line| {
                let mut cols: Vec<&str> = line.split(',').collect();
                cols.pop();
                cols.join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}
