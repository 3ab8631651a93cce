//! JSON documents for solver traces and flow trajectories.

use serde::{Deserialize, Serialize};

use crate::flow::FlowTrajectory;
use crate::solver::{Mode, SolveTrace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub problem: String,
    /// `classical`, `fixed` or `adaptive`.
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub iterates: Vec<Vec<f64>>,
    pub steps: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub update_norms: Vec<f64>,
    pub status: String,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl TraceDocument {
    pub fn new(problem: &str, mode: Mode, trace: &SolveTrace, label: Option<String>) -> Self {
        let (tau, t) = match mode {
            Mode::Classical => (None, Some(1.0)),
            Mode::Fixed { t } => (None, Some(t)),
            Mode::Adaptive { tau } => (Some(tau), None),
        };
        Self {
            problem: problem.to_string(),
            mode: mode.name().to_string(),
            tau,
            t,
            iterates: trace.iterates.clone(),
            steps: trace.steps.clone(),
            residual_norms: trace.residual_norms.clone(),
            update_norms: trace.update_norms.clone(),
            status: trace.status.as_str().to_string(),
            iterations: trace.iterations(),
            label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowDocument {
    pub problem: String,
    pub mode: String,
    pub dt: f64,
    pub times: Vec<f64>,
    pub iterates: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl FlowDocument {
    pub fn new(problem: &str, traj: &FlowTrajectory, label: Option<String>) -> Self {
        Self {
            problem: problem.to_string(),
            mode: "flow".into(),
            dt: traj.dt,
            times: traj.times.clone(),
            iterates: traj.states.clone(),
            residual_norms: traj.residual_norms.clone(),
            status: traj.status.as_str().to_string(),
            label,
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents contain only plain data")
}
