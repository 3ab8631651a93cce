//! Newton iteration with prediction-based adaptive step sizes.
//!
//! The damped iteration `x_{n+1} = x_n + t_n N_F(x_n)` is the explicit
//! Euler discretization of the continuous Newton flow `ẋ = N_F(x)` with
//! `N_F(x) = -F'(x)^{-1} F(x)`. Choosing
//! `t_n = min(sqrt(2τ / ‖N_F(x_n)‖), 1)` keeps the iterates close to the
//! flow while retaining full steps (and quadratic convergence) near simple
//! roots.
//!
//! The crate contains the solver ([`solver`]), the reference flow
//! integrator ([`flow`]), the benchmark problems ([`problems`]), a registry
//! mapping problem ids to ready-to-sample benchmarks ([`benchmark`]) and
//! basin-of-attraction sampling with statistics and image output
//! ([`basin`]).

pub mod basin;
pub mod benchmark;
pub mod flow;
pub mod linalg;
pub mod problem;
pub mod problems;
pub mod report;
pub mod solver;

pub use benchmark::{parse_benchmark, Benchmark, Rect};
pub use flow::{flow, FlowConfig, FlowStatus, FlowTrajectory};
pub use problem::{Jacobian, NonlinearProblem};
pub use solver::{adaptive_step, error_indicator, newton_step, nrt, solve, Mode, SolveStatus, SolveTrace, SolverConfig};
