//! Explicit-Euler integration of the continuous Newton flow `ẋ = N_F(x)`.
//!
//! With a small step the discrete trajectory tracks the exact flow, whose
//! residual decays like `F(x(t)) = F(x_0) e^{-t}`. The end point is the
//! reference ("correct") root for a given initial state.

use serde::{Deserialize, Serialize};

use crate::linalg::dot;
use crate::problem::NonlinearProblem;
use crate::solver::{axpy, nrt_with_residual, NewtonError, DEFAULT_BLOWUP_NORM};

pub const DEFAULT_FLOW_DT: f64 = 1e-2;
pub const DEFAULT_FLOW_T_MAX: f64 = 50.0;
pub const DEFAULT_FLOW_RESIDUAL_STOP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub dt: f64,
    pub t_max: f64,
    pub residual_stop: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { dt: DEFAULT_FLOW_DT, t_max: DEFAULT_FLOW_T_MAX, residual_stop: DEFAULT_FLOW_RESIDUAL_STOP }
    }
}

/// How a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowStatus {
    /// Residual dropped to `residual_stop`.
    Converged,
    /// `t_max` reached first.
    TimeLimit,
    /// `F'` became singular.
    Singular,
    LeftDomain,
    Blowup,
    /// The trajectory ran into the critical set: even a reduced Euler step
    /// increased the residual, or the field reversed within one step. The
    /// exact flow does neither.
    Stalled,
}

impl FlowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlowStatus::Converged => "Converged",
            FlowStatus::TimeLimit => "TimeLimit",
            FlowStatus::Singular => "Singular",
            FlowStatus::LeftDomain => "LeftDomain",
            FlowStatus::Blowup => "Blowup",
            FlowStatus::Stalled => "Stalled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub status: FlowStatus,
}

impl FlowTrajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory always holds x0")
    }

    pub fn converged(&self) -> bool {
        self.status == FlowStatus::Converged
    }
}

/// Times an Euler step may be halved when it fails to reduce the residual.
pub const MAX_STEP_HALVINGS: u32 = 6;

/// Integrates the Newton flow from `x0` with step `cfg.dt`.
///
/// The exact flow decreases `‖F‖` monotonically, so an Euler step that
/// increases it has outrun the trajectory. Such a step is retried with
/// half the step size, up to [`MAX_STEP_HALVINGS`] times; if even the
/// smallest step increases the residual, or the field reverses direction
/// across a step, the trajectory is declared [`FlowStatus::Stalled`]. Away from strong nonlinearities every step has
/// length `dt` and the times are uniform.
pub fn flow<P: NonlinearProblem + ?Sized>(p: &P, x0: &[f64], cfg: &FlowConfig) -> FlowTrajectory {
    let mut out = FlowTrajectory {
        dt: cfg.dt,
        times: vec![0.0],
        states: vec![x0.to_vec()],
        residual_norms: Vec::new(),
        status: FlowStatus::TimeLimit,
    };
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut fine = 0u64;
    let mut prev_direction: Option<Vec<f64>> = None;
    let max_fine = (cfg.t_max / cfg.dt).ceil() as u64 * (1 << MAX_STEP_HALVINGS);
    loop {
        let (d, f) = match nrt_with_residual(p, &x) {
            Ok(v) => v,
            Err(NewtonError::OutOfDomain) => {
                out.residual_norms.push(p.norm(&p.residual(&x)));
                out.status = FlowStatus::LeftDomain;
                break;
            }
            Err(NewtonError::SingularJacobian(_)) => {
                out.residual_norms.push(p.norm(&p.residual(&x)));
                out.status = FlowStatus::Singular;
                break;
            }
        };
        let r = p.norm(&f);
        out.residual_norms.push(r);
        if r <= cfg.residual_stop {
            out.status = FlowStatus::Converged;
            break;
        }
        // The field is continuous along the exact trajectory; a reversal
        // within one step means the iterate jumped across the critical set.
        if prev_direction.as_deref().is_some_and(|prev| dot(prev, &d) < 0.0) {
            out.status = FlowStatus::Stalled;
            break;
        }
        if t >= cfg.t_max - 1e-9 * cfg.dt || fine >= max_fine {
            out.status = FlowStatus::TimeLimit;
            break;
        }
        let mut halvings = 0;
        let accepted = loop {
            let h = cfg.dt / f64::from(1u32 << halvings);
            let y = axpy(&x, h, &d);
            let failure = if !y.iter().all(|v| v.is_finite()) {
                Some(FlowStatus::Blowup)
            } else if !p.in_domain(&y) {
                Some(FlowStatus::LeftDomain)
            } else if p.norm(&p.residual(&y)) > r {
                Some(FlowStatus::Stalled)
            } else {
                None
            };
            match failure {
                None => break Some((y, halvings)),
                Some(status) if halvings == MAX_STEP_HALVINGS => {
                    out.status = status;
                    break None;
                }
                Some(_) => halvings += 1,
            }
        };
        let Some((y, used)) = accepted else { break };
        prev_direction = Some(d);
        x = y;
        fine += 1 << (MAX_STEP_HALVINGS - used);
        t = fine as f64 * cfg.dt / f64::from(1u32 << MAX_STEP_HALVINGS);
        out.times.push(t);
        out.states.push(x.clone());
        if p.norm(&x) > DEFAULT_BLOWUP_NORM {
            out.residual_norms.push(p.norm(&p.residual(&x)));
            out.status = FlowStatus::Blowup;
            break;
        }
    }
    out
}
