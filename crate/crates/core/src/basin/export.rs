//! Plot-ready exports: direction fields of `F` or of the Newton field, and
//! side-by-side classical / adaptive / flow trajectories.

use std::fmt::Write as _;

use serde::Serialize;

use super::sample::point;
use crate::benchmark::{Benchmark, Rect};
use crate::flow::{flow, FlowConfig};
use crate::problem::NonlinearProblem;
use crate::report::{FlowDocument, TraceDocument};
use crate::solver::{nrt, solve, Mode, NewtonError};

pub const FIELD_CSV_HEADER: &str = "x,y,vx,vy,magnitude,flag";

/// Below this magnitude a vector counts as zero.
const FIXED_POINT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// The residual `F(x)`.
    Raw,
    /// The Newton field `N_F(x) = -F'(x)^{-1} F(x)`.
    Nrt,
}

impl std::str::FromStr for FieldKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "raw" => Ok(FieldKind::Raw),
            "nrt" => Ok(FieldKind::Nrt),
            _ => Err(format!("unknown field kind `{s}` (expected raw or nrt)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFlag {
    Ok,
    FixedPoint,
    Singular,
    OutOfDomain,
}

impl FieldFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldFlag::Ok => "ok",
            FieldFlag::FixedPoint => "fixed_point",
            FieldFlag::Singular => "singular",
            FieldFlag::OutOfDomain => "out_of_domain",
        }
    }
}

/// One sample of a planar field. `direction` is the unit vector, `None`
/// where the field is undefined or zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub direction: Option<(f64, f64)>,
    pub magnitude: f64,
    pub flag: FieldFlag,
}

pub fn field_sample<P: NonlinearProblem + ?Sized>(p: &P, x: f64, y: f64, kind: FieldKind) -> FieldSample {
    let state = [x, y];
    let v = match kind {
        FieldKind::Raw => Ok(p.residual(&state)),
        FieldKind::Nrt => nrt(p, &state),
    };
    let (v, flag) = match v {
        Ok(v) => (v, FieldFlag::Ok),
        Err(NewtonError::SingularJacobian(_)) => return FieldSample { x, y, direction: None, magnitude: f64::NAN, flag: FieldFlag::Singular },
        Err(NewtonError::OutOfDomain) => return FieldSample { x, y, direction: None, magnitude: f64::NAN, flag: FieldFlag::OutOfDomain },
    };
    let magnitude = v[0].hypot(v[1]);
    if !magnitude.is_finite() {
        return FieldSample { x, y, direction: None, magnitude: f64::NAN, flag: FieldFlag::Singular };
    }
    if magnitude <= FIXED_POINT_EPS {
        return FieldSample { x, y, direction: None, magnitude, flag: FieldFlag::FixedPoint };
    }
    FieldSample { x, y, direction: Some((v[0] / magnitude, v[1] / magnitude)), magnitude, flag }
}

/// Samples a planar problem on an inclusive `nx × ny` grid, top row first.
pub fn direction_field<P: NonlinearProblem + ?Sized>(p: &P, rect: Rect, nx: usize, ny: usize, kind: FieldKind) -> Vec<FieldSample> {
    assert_eq!(p.dim(), 2, "direction fields need a planar problem");
    (0..nx * ny)
        .map(|c| {
            let (x, y) = point(&rect, nx, ny, c % nx, c / nx);
            field_sample(p, x, y, kind)
        })
        .collect()
}

pub fn field_csv(samples: &[FieldSample]) -> String {
    let mut out = String::from(FIELD_CSV_HEADER);
    out.push('\n');
    for s in samples {
        let (vx, vy) = match s.direction {
            Some((a, b)) => (format!("{a:.9}"), format!("{b:.9}")),
            None if s.flag == FieldFlag::FixedPoint => ("0".into(), "0".into()),
            None => (String::new(), String::new()),
        };
        let mag = if s.magnitude.is_finite() { format!("{:.9e}", s.magnitude) } else { String::new() };
        let _ = writeln!(out, "{:.9},{:.9},{vx},{vy},{mag},{}", s.x, s.y, s.flag.as_str());
    }
    out
}

/// Classical, adaptive and flow runs from one initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryComparison {
    pub problem: String,
    pub x0: Vec<f64>,
    pub labels: Vec<String>,
    pub classical: TraceDocument,
    pub adaptive: TraceDocument,
    pub flow: FlowDocument,
}

impl TrajectoryComparison {
    pub fn classical_label(&self) -> Option<&str> {
        self.classical.label.as_deref()
    }

    pub fn adaptive_label(&self) -> Option<&str> {
        self.adaptive.label.as_deref()
    }

    pub fn flow_label(&self) -> Option<&str> {
        self.flow.label.as_deref()
    }

    pub fn to_json(&self) -> String {
        crate::report::to_json(self)
    }

    /// Long format: `method,k,param,residual_norm,x_0,…,x_{d-1}` where
    /// `param` is the step size for the discrete runs and the time for the flow.
    pub fn to_csv(&self) -> String {
        let dim = self.x0.len();
        let mut out = String::from("method,k,param,residual_norm");
        for i in 0..dim {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        let mut rows = |method: &str, params: &[f64], res: &[f64], states: &[Vec<f64>]| {
            for (k, x) in states.iter().enumerate() {
                let param = params.get(k).map_or(String::new(), |v| format!("{v:.9e}"));
                let r = res.get(k).map_or(String::new(), |v| format!("{v:.9e}"));
                let _ = write!(out, "{method},{k},{param},{r}");
                for v in x {
                    let _ = write!(out, ",{v:.12e}");
                }
                out.push('\n');
            }
        };
        rows("classical", &self.classical.steps, &self.classical.residual_norms, &self.classical.iterates);
        rows("adaptive", &self.adaptive.steps, &self.adaptive.residual_norms, &self.adaptive.iterates);
        rows("flow", &self.flow.times, &self.flow.residual_norms, &self.flow.iterates);
        out
    }
}

pub fn trajectory_comparison(bench: &dyn Benchmark, x0: &[f64], tau: f64, flow_cfg: &FlowConfig) -> TrajectoryComparison {
    let names = bench.label_names();
    let name_of = |l: Option<usize>| l.map(|i| names[i].clone());
    let p = bench.problem();
    let id = bench.id();
    let run = |mode: Mode| {
        let trace = solve(p, x0, &bench.solver_config(mode));
        let label = if trace.converged() { bench.classify(trace.final_state()) } else { None };
        TraceDocument::new(&id, mode, &trace, name_of(label))
    };
    let classical = run(Mode::Classical);
    let adaptive = run(Mode::Adaptive { tau });
    let traj = flow(p, x0, flow_cfg);
    let flow_label = if traj.converged() { bench.classify(traj.final_state()) } else { None };
    TrajectoryComparison {
        problem: id.clone(),
        x0: x0.to_vec(),
        labels: names.clone(),
        classical,
        adaptive,
        flow: FlowDocument::new(&id, &traj, name_of(flow_label)),
    }
}
