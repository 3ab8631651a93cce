//! Damped Newton iteration `x_{n+1} = x_n + t_n N_F(x_n)` with classical,
//! fixed and adaptive step-size selection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::problem::NonlinearProblem;

/// Absolute threshold on `‖δ_n‖` for convergence.
pub const DEFAULT_UPDATE_TOL: f64 = 1e-8;
/// State norm beyond which an iteration is declared divergent.
pub const DEFAULT_BLOWUP_NORM: f64 = 1e8;
pub const DEFAULT_MAX_ITERS_ALGEBRAIC: usize = 100;
pub const DEFAULT_MAX_ITERS_BVP: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewtonError {
    #[error("Jacobian is not invertible: {0}")]
    SingularJacobian(#[from] LinalgError),
    #[error("state lies outside the problem domain")]
    OutOfDomain,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModeParseError {
    #[error("unknown mode `{0}` (expected classical, fixed:<t> or adaptive:<tau>)")]
    Unknown(String),
    #[error("invalid number in mode `{0}`")]
    BadNumber(String),
    #[error("fixed step must lie in (0, 1], got {0}")]
    StepOutOfRange(f64),
    #[error("tolerance tau must be positive and finite, got {0}")]
    NonPositiveTau(f64),
}

/// Step-size policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    /// `t_n = 1`.
    Classical,
    /// `t_n = t` for a constant `t ∈ (0, 1]`.
    Fixed { t: f64 },
    /// `t_n = min(sqrt(2τ / ‖N_F(x_n)‖), 1)`.
    Adaptive { tau: f64 },
}

impl Mode {
    pub fn fixed(t: f64) -> Result<Self, ModeParseError> {
        if t > 0.0 && t <= 1.0 {
            Ok(Mode::Fixed { t })
        } else {
            Err(ModeParseError::StepOutOfRange(t))
        }
    }

    pub fn adaptive(tau: f64) -> Result<Self, ModeParseError> {
        if tau > 0.0 && tau.is_finite() {
            Ok(Mode::Adaptive { tau })
        } else {
            Err(ModeParseError::NonPositiveTau(tau))
        }
    }

    /// Step size for an iterate whose Newton update has norm `nrt_norm`.
    pub fn step_size(&self, nrt_norm: f64) -> f64 {
        match *self {
            Mode::Classical => 1.0,
            Mode::Fixed { t } => t,
            Mode::Adaptive { tau } => adaptive_step(tau, nrt_norm),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Classical => "classical",
            Mode::Fixed { .. } => "fixed",
            Mode::Adaptive { .. } => "adaptive",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Classical => write!(f, "classical"),
            Mode::Fixed { t } => write!(f, "fixed:{t}"),
            Mode::Adaptive { tau } => write!(f, "adaptive:{tau}"),
        }
    }
}

impl FromStr for Mode {
    type Err = ModeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "classical" {
            return Ok(Mode::Classical);
        }
        let (kind, value) = s.split_once(':').ok_or_else(|| ModeParseError::Unknown(s.to_string()))?;
        let number: f64 = value.trim().parse().map_err(|_| ModeParseError::BadNumber(s.to_string()))?;
        match kind {
            "fixed" => Mode::fixed(number),
            "adaptive" => Mode::adaptive(number),
            _ => Err(ModeParseError::Unknown(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    pub max_iters: usize,
    /// Convergence threshold on `‖δ_n‖ = t_n ‖N_F(x_n)‖`.
    pub update_tol: f64,
    pub blowup_norm: f64,
}

impl SolverConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            max_iters: DEFAULT_MAX_ITERS_ALGEBRAIC,
            update_tol: DEFAULT_UPDATE_TOL,
            blowup_norm: DEFAULT_BLOWUP_NORM,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_update_tol(mut self, tol: f64) -> Self {
        self.update_tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Singular,
    LeftDomain,
    Blowup,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIters => "MaxIters",
            SolveStatus::Singular => "Singular",
            SolveStatus::LeftDomain => "LeftDomain",
            SolveStatus::Blowup => "Blowup",
        }
    }
}

/// Full history of one Newton run.
///
/// `iterates` and `residual_norms` hold `x_0..x_N`; `steps` and
/// `update_norms` hold one entry per performed update, so they are one
/// shorter. When the run converges, the last update is the sub-tolerance
/// correction that triggered the stop.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub iterates: Vec<Vec<f64>>,
    pub steps: Vec<f64>,
    pub residual_norms: Vec<f64>,
    /// `‖N_F(x_n)‖`, the untruncated Newton update.
    pub update_norms: Vec<f64>,
    pub status: SolveStatus,
}

impl SolveTrace {
    pub fn final_state(&self) -> &[f64] {
        self.iterates.last().expect("trace always holds x0")
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Number of Newton steps needed before the update dropped below the
    /// tolerance; for non-converged runs, the number of updates performed.
    pub fn iterations(&self) -> usize {
        if self.converged() {
            self.steps.len() - 1
        } else {
            self.steps.len()
        }
    }

    pub fn mean_step(&self) -> Option<f64> {
        if self.steps.is_empty() {
            None
        } else {
            Some(self.steps.iter().sum::<f64>() / self.steps.len() as f64)
        }
    }
}

/// Prediction step size `min(sqrt(2τ/‖N‖), 1)`; a vanishing update keeps the full step.
pub fn adaptive_step(tau: f64, nrt_norm: f64) -> f64 {
    debug_assert!(tau > 0.0);
    if nrt_norm <= 2.0 * tau {
        return 1.0;
    }
    (2.0 * tau / nrt_norm).sqrt().min(1.0)
}

/// Computable leading part `‖N_F(x_0)‖ (t + e^{-t} - 1)` of the distance
/// between the Euler prediction and the continuous trajectory.
pub fn error_indicator(nrt_norm: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    // exp_m1 keeps the small-t regime accurate.
    nrt_norm * (t + (-t).exp_m1())
}

/// Newton–Raphson transform `N_F(x) = -F'(x)^{-1} F(x)`.
pub fn nrt<P: NonlinearProblem + ?Sized>(p: &P, x: &[f64]) -> Result<Vec<f64>, NewtonError> {
    nrt_with_residual(p, x).map(|(d, _)| d)
}

pub(crate) fn nrt_with_residual<P: NonlinearProblem + ?Sized>(
    p: &P,
    x: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), NewtonError> {
    if !p.in_domain(x) {
        return Err(NewtonError::OutOfDomain);
    }
    let f = p.residual(x);
    let neg_f: Vec<f64> = f.iter().map(|v| -v).collect();
    if neg_f.iter().all(|v| *v == 0.0) {
        return Ok((neg_f, f));
    }
    let d = p.jacobian(x).solve(&neg_f)?;
    if d.iter().any(|v| !v.is_finite()) {
        return Err(NewtonError::SingularJacobian(LinalgError::SingularMatrix { row: 0, pivot: f64::NAN }));
    }
    Ok((d, f))
}

/// One damped step `x + t N_F(x)`.
pub fn newton_step<P: NonlinearProblem + ?Sized>(p: &P, x: &[f64], t: f64) -> Result<Vec<f64>, NewtonError> {
    let d = nrt(p, x)?;
    Ok(axpy(x, t, &d))
}

pub(crate) fn axpy(x: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

/// Runs the damped Newton iteration from `x0` until the update norm falls
/// below `cfg.update_tol` or a failure ends the run.
pub fn solve<P: NonlinearProblem + ?Sized>(p: &P, x0: &[f64], cfg: &SolverConfig) -> SolveTrace {
    assert_eq!(x0.len(), p.dim(), "initial state has the wrong dimension");
    let mut trace = SolveTrace {
        iterates: vec![x0.to_vec()],
        steps: Vec::new(),
        residual_norms: Vec::new(),
        update_norms: Vec::new(),
        status: SolveStatus::MaxIters,
    };
    if !p.in_domain(x0) {
        trace.residual_norms.push(p.norm(&p.residual(x0)));
        trace.status = SolveStatus::LeftDomain;
        return trace;
    }
    let mut x = x0.to_vec();
    for _ in 0..cfg.max_iters {
        let (d, f) = match nrt_with_residual(p, &x) {
            Ok(v) => v,
            Err(NewtonError::OutOfDomain) => {
                trace.status = SolveStatus::LeftDomain;
                break;
            }
            Err(NewtonError::SingularJacobian(_)) => {
                trace.status = SolveStatus::Singular;
                break;
            }
        };
        trace.residual_norms.push(p.norm(&f));
        let nrt_norm = p.norm(&d);
        let t = cfg.mode.step_size(nrt_norm);
        x = axpy(&x, t, &d);
        trace.steps.push(t);
        trace.update_norms.push(nrt_norm);
        trace.iterates.push(x.clone());

        if t * nrt_norm <= cfg.update_tol {
            trace.status = SolveStatus::Converged;
            break;
        }
        if x.iter().any(|v| !v.is_finite()) || p.norm(&x) > cfg.blowup_norm {
            trace.status = SolveStatus::Blowup;
            break;
        }
        if !p.in_domain(&x) {
            trace.status = SolveStatus::LeftDomain;
            break;
        }
    }
    // Residual of the last iterate; earlier ones were recorded inside the loop.
    if trace.residual_norms.len() < trace.iterates.len() {
        let last = trace.final_state();
        let r = if last.iter().all(|v| v.is_finite()) { p.norm(&p.residual(last)) } else { f64::INFINITY };
        trace.residual_norms.push(r);
    }
    trace
}
