//! Problem registry: each benchmark bundles a problem with its initial-guess
//! family, solution classifier and sampling defaults.
//!
//! Recognized ids: `cubic`, `expsin`, `cubic-bvp:n=<n>`, `bratu:n=<n>`,
//! `cubic-pde:n=<n>`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::FlowConfig;
use crate::problem::NonlinearProblem;
use crate::problems::algebraic::{CubicProblem, ExpSinProblem, RootCatalog};
use crate::problems::bvp1d::{self, Bvp1dProblem, FemFunction, SolutionLabels1D};
use crate::problems::pde2d::{self, CubicPdeProblem, Grid2D, HillParams, PdeLabels};
use crate::solver::{Mode, SolverConfig, DEFAULT_MAX_ITERS_ALGEBRAIC, DEFAULT_MAX_ITERS_BVP};

/// Two function-space iterates closer than this (in the problem norm) are
/// the same solution.
pub const SAME_SOLUTION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),
    #[error("problem `{id}` needs a parameter of the form n=<integer> (got `{params}`)")]
    BadParameter { id: String, params: String },
    #[error("mesh size {n} too small for `{id}` (minimum {min})")]
    MeshTooSmall { id: String, n: usize, min: usize },
}

/// Axis-aligned parameter rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn is_valid(&self) -> bool {
        self.x0 < self.x1 && self.y0 < self.y1 && [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

/// Reference-root computation for one initial guess.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OracleConfig {
    pub flow: FlowConfig,
    /// Finish a converged flow with full Newton steps instead of driving
    /// the residual all the way down with Euler steps.
    pub polish: bool,
}


/// A problem together with everything needed to sample its basins.
pub trait Benchmark: Sync {
    fn id(&self) -> String;

    fn problem(&self) -> &dyn NonlinearProblem;

    fn label_names(&self) -> Vec<String>;

    /// Solution label of a (converged) state.
    fn classify(&self, x: &[f64]) -> Option<usize>;

    /// Error of `x` used for convergence-rate fitting; `label` is the
    /// solution the iteration is known to approach.
    fn error(&self, x: &[f64], label: usize) -> f64;

    /// Whether two converged states represent the same solution.
    fn same_solution(&self, a: &[f64], b: &[f64]) -> bool;

    /// Maps a point of the parameter plane to an initial state.
    fn initial_guess(&self, s: f64, t: f64) -> Vec<f64>;

    fn default_rect(&self) -> Rect;

    fn default_resolution(&self, paper_scale: bool) -> (usize, usize);

    fn max_iters(&self) -> usize;

    fn default_oracle(&self) -> OracleConfig {
        OracleConfig::default()
    }

    /// Root locations in the parameter plane, for image overlays.
    fn markers(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }

    /// True when the parameter plane is the state space itself.
    fn is_planar(&self) -> bool {
        false
    }

    fn solver_config(&self, mode: Mode) -> SolverConfig {
        SolverConfig::new(mode).with_max_iters(self.max_iters())
    }
}

/// Options that select a member of a benchmark family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkOptions {
    /// Fixed `y`-position of the hill peak, as a fraction of the side, for PDE slices.
    pub slice: f64,
    /// Amplitude range `[-c, c]` of PDE hill guesses.
    pub amplitude_bound: f64,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        Self { slice: 0.5, amplitude_bound: 8.0 }
    }
}

pub fn parse_benchmark(id: &str) -> Result<Box<dyn Benchmark>, RegistryError> {
    parse_benchmark_with(id, &BenchmarkOptions::default())
}

pub fn parse_benchmark_with(id: &str, opts: &BenchmarkOptions) -> Result<Box<dyn Benchmark>, RegistryError> {
    let id = id.trim();
    let (name, params) = match id.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (id, None),
    };
    let mesh = |default: usize, min: usize| -> Result<usize, RegistryError> {
        let n = match params {
            None => default,
            Some(p) => p
                .strip_prefix("n=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| RegistryError::BadParameter { id: name.to_string(), params: p.to_string() })?,
        };
        if n < min {
            return Err(RegistryError::MeshTooSmall { id: name.to_string(), n, min });
        }
        Ok(n)
    };
    let no_params = || match params {
        None => Ok(()),
        Some(p) => Err(RegistryError::BadParameter { id: name.to_string(), params: p.to_string() }),
    };
    match name {
        "cubic" => {
            no_params()?;
            Ok(Box::new(CubicBenchmark::new()))
        }
        "expsin" => {
            no_params()?;
            Ok(Box::new(ExpSinBenchmark::new()))
        }
        "cubic-bvp" => Ok(Box::new(BvpBenchmark::cubic(mesh(bvp1d::DEFAULT_MESH_N, 2)?))),
        "bratu" => Ok(Box::new(BvpBenchmark::bratu(mesh(bvp1d::DEFAULT_MESH_N, 2)?))),
        "cubic-pde" => Ok(Box::new(PdeBenchmark::new(mesh(pde2d::DEFAULT_SLICE_N, 4)?, opts.slice, opts.amplitude_bound))),
        _ => Err(RegistryError::UnknownProblem(id.to_string())),
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// `z³ - 2z - 4` sampled on the state plane.
pub struct CubicBenchmark {
    problem: CubicProblem,
    roots: RootCatalog,
}

impl CubicBenchmark {
    pub fn new() -> Self {
        Self { problem: CubicProblem, roots: CubicProblem::roots() }
    }

    pub fn roots(&self) -> &RootCatalog {
        &self.roots
    }
}

impl Default for CubicBenchmark {
    fn default() -> Self {
        Self::new()
    }
}

impl Benchmark for CubicBenchmark {
    fn id(&self) -> String {
        "cubic".into()
    }
    fn problem(&self) -> &dyn NonlinearProblem {
        &self.problem
    }
    fn label_names(&self) -> Vec<String> {
        self.roots.iter().map(|(l, _)| l.to_string()).collect()
    }
    fn classify(&self, x: &[f64]) -> Option<usize> {
        self.roots.identify(x)
    }
    fn error(&self, x: &[f64], label: usize) -> f64 {
        distance(x, self.roots.root(label))
    }
    fn same_solution(&self, _a: &[f64], _b: &[f64]) -> bool {
        true
    }
    fn initial_guess(&self, s: f64, t: f64) -> Vec<f64> {
        vec![s, t]
    }
    fn default_rect(&self) -> Rect {
        Rect::new(-5.0, 5.0, -5.0, 5.0)
    }
    fn default_resolution(&self, paper_scale: bool) -> (usize, usize) {
        if paper_scale {
            (1001, 1001)
        } else {
            (201, 201)
        }
    }
    fn max_iters(&self) -> usize {
        DEFAULT_MAX_ITERS_ALGEBRAIC
    }
    fn markers(&self) -> Vec<(f64, f64)> {
        self.roots.iter().map(|(_, r)| (r[0], r[1])).collect()
    }
    fn is_planar(&self) -> bool {
        true
    }
}

/// The exp/sin system with roots catalogued on `[-1.5, 1.5]²`. Iterates
/// are not stopped at the box edge; a run that settles on a root outside
/// the box counts as unclassified.
pub struct ExpSinBenchmark {
    problem: ExpSinProblem,
}

impl ExpSinBenchmark {
    pub fn new() -> Self {
        Self { problem: ExpSinProblem::unbounded() }
    }

    /// Variant that stops iterations leaving the box.
    pub fn bounded() -> Self {
        Self { problem: ExpSinProblem::new() }
    }

    pub fn roots(&self) -> &RootCatalog {
        self.problem.roots()
    }
}

impl Default for ExpSinBenchmark {
    fn default() -> Self {
        Self::new()
    }
}

impl Benchmark for ExpSinBenchmark {
    fn id(&self) -> String {
        "expsin".into()
    }
    fn problem(&self) -> &dyn NonlinearProblem {
        &self.problem
    }
    fn label_names(&self) -> Vec<String> {
        self.roots().iter().map(|(l, _)| l.to_string()).collect()
    }
    fn classify(&self, x: &[f64]) -> Option<usize> {
        self.roots().identify(x)
    }
    fn error(&self, x: &[f64], label: usize) -> f64 {
        distance(x, self.roots().root(label))
    }
    fn same_solution(&self, _a: &[f64], _b: &[f64]) -> bool {
        true
    }
    fn initial_guess(&self, s: f64, t: f64) -> Vec<f64> {
        vec![s, t]
    }
    fn default_rect(&self) -> Rect {
        Rect::new(0.0, 1.5, -1.5, 0.0)
    }
    fn default_resolution(&self, paper_scale: bool) -> (usize, usize) {
        if paper_scale {
            (1001, 1001)
        } else {
            (100, 100)
        }
    }
    fn max_iters(&self) -> usize {
        DEFAULT_MAX_ITERS_ALGEBRAIC
    }
    fn markers(&self) -> Vec<(f64, f64)> {
        self.roots().iter().map(|(_, r)| (r[0], r[1])).collect()
    }
    fn is_planar(&self) -> bool {
        true
    }
}

/// Shape of the 1-D initial guess with value `α` at node `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessShape {
    /// Nonzero only at node `i`.
    Nodal,
    /// Linear from both boundaries up to node `i`.
    Tent,
}

/// 1-D boundary-value problem sampled over hat guesses `(i h, α)`.
///
/// Step sizes are controlled in the Euclidean norm of the nodal
/// coefficients; `with_norm` switches to the discrete L² norm.
pub struct BvpBenchmark {
    problem: Bvp1dProblem,
    guess: GuessShape,
    labels: SolutionLabels1D,
    name: &'static str,
    rect: Rect,
}

impl BvpBenchmark {
    pub fn cubic(n: usize) -> Self {
        Self {
            problem: Bvp1dProblem::cubic(n).with_norm(bvp1d::CoefficientNorm::Euclidean),
            guess: GuessShape::Tent,
            labels: SolutionLabels1D::cubic(),
            name: "cubic-bvp",
            rect: Rect::new(0.01, 0.99, -4.0, 4.0),
        }
    }

    pub fn bratu(n: usize) -> Self {
        Self {
            problem: Bvp1dProblem::bratu(n).with_norm(bvp1d::CoefficientNorm::Euclidean),
            guess: GuessShape::Tent,
            labels: SolutionLabels1D::bratu(),
            name: "bratu",
            rect: Rect::new(0.01, 0.99, 0.0, 3.0),
        }
    }

    pub fn with_guess(mut self, guess: GuessShape) -> Self {
        self.guess = guess;
        self
    }

    pub fn with_norm(mut self, norm: bvp1d::CoefficientNorm) -> Self {
        self.problem = self.problem.with_norm(norm);
        self
    }

    pub fn bvp(&self) -> &Bvp1dProblem {
        &self.problem
    }

    pub fn labels(&self) -> &SolutionLabels1D {
        &self.labels
    }

    fn integral(&self, x: &[f64]) -> f64 {
        bvp1d::integral_value(&FemFunction::new(self.problem.mesh, x.to_vec()))
    }
}

impl Benchmark for BvpBenchmark {
    fn id(&self) -> String {
        format!("{}:n={}", self.name, self.problem.mesh.n())
    }
    fn problem(&self) -> &dyn NonlinearProblem {
        &self.problem
    }
    fn label_names(&self) -> Vec<String> {
        self.labels.names.clone()
    }
    fn classify(&self, x: &[f64]) -> Option<usize> {
        self.labels.classify_integral(self.integral(x), bvp1d::DEFAULT_CLASSIFY_TOL)
    }
    fn error(&self, x: &[f64], _label: usize) -> f64 {
        self.labels.integral_error(self.integral(x))
    }
    fn same_solution(&self, a: &[f64], b: &[f64]) -> bool {
        let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
        self.problem.norm(&d) <= SAME_SOLUTION_TOL
    }
    fn initial_guess(&self, s: f64, t: f64) -> Vec<f64> {
        let mesh = self.problem.mesh;
        let i = bvp1d::node_for_coordinate(mesh, s);
        let guess = match self.guess {
            GuessShape::Nodal => bvp1d::hat_initial_guess(mesh, i, t),
            GuessShape::Tent => bvp1d::tent_initial_guess(mesh, i, t),
        };
        guess.expect("node index is clamped into range").values
    }
    fn default_rect(&self) -> Rect {
        self.rect
    }
    fn default_resolution(&self, paper_scale: bool) -> (usize, usize) {
        if paper_scale {
            (400, 400)
        } else {
            (100, 100)
        }
    }
    fn max_iters(&self) -> usize {
        DEFAULT_MAX_ITERS_BVP
    }
}

/// 2-D slice through the hill-guess family of `Δu + u³ = 0`: the peak row
/// is fixed, the parameter plane is (peak column `k/n`, amplitude).
pub struct PdeBenchmark {
    problem: CubicPdeProblem,
    labels: PdeLabels,
    slice: f64,
    amplitude_bound: f64,
}

impl PdeBenchmark {
    pub fn new(n: usize, slice: f64, amplitude_bound: f64) -> Self {
        let grid = Grid2D::new(n);
        let positive = pde2d::positive_solution(grid);
        let labels = PdeLabels { positive_integral: pde2d::grid_integral(grid, &positive.values) };
        Self { problem: CubicPdeProblem { grid }, labels, slice, amplitude_bound }
    }

    pub fn labels(&self) -> &PdeLabels {
        &self.labels
    }

    pub fn grid(&self) -> Grid2D {
        self.problem.grid
    }

    fn hill(&self, s: f64, amplitude: f64) -> HillParams {
        let n = self.problem.grid.n();
        let nf = n as f64;
        let clamp = |v: f64| v.clamp(1.0, nf - 1.0);
        HillParams { k: clamp(s * nf), j: clamp(self.slice * nf), n, amplitude }
    }
}

impl Benchmark for PdeBenchmark {
    fn id(&self) -> String {
        format!("cubic-pde:n={}", self.problem.grid.n())
    }
    fn problem(&self) -> &dyn NonlinearProblem {
        &self.problem
    }
    fn label_names(&self) -> Vec<String> {
        PdeLabels::NAMES.iter().map(|s| s.to_string()).collect()
    }
    fn classify(&self, x: &[f64]) -> Option<usize> {
        self.labels.classify_integral(pde2d::grid_integral(self.problem.grid, x), pde2d::DEFAULT_CLASSIFY_TOL)
    }
    fn error(&self, x: &[f64], _label: usize) -> f64 {
        self.labels.integral_error(pde2d::grid_integral(self.problem.grid, x))
    }
    fn same_solution(&self, a: &[f64], b: &[f64]) -> bool {
        let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
        self.problem.norm(&d) <= SAME_SOLUTION_TOL
    }
    fn initial_guess(&self, s: f64, t: f64) -> Vec<f64> {
        pde2d::hill_initial_guess(&self.hill(s, t), self.problem.grid).values
    }
    fn default_rect(&self) -> Rect {
        let nf = self.problem.grid.n() as f64;
        Rect::new(1.0 / nf, 1.0 - 1.0 / nf, -self.amplitude_bound, self.amplitude_bound)
    }
    fn default_resolution(&self, paper_scale: bool) -> (usize, usize) {
        if paper_scale {
            (500, 500)
        } else {
            (64, 64)
        }
    }
    fn max_iters(&self) -> usize {
        DEFAULT_MAX_ITERS_BVP
    }
    fn default_oracle(&self) -> OracleConfig {
        OracleConfig { flow: FlowConfig { dt: 0.05, t_max: 50.0, residual_stop: 1e-4 }, polish: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids() {
        assert_eq!(parse_benchmark("cubic").unwrap().id(), "cubic");
        assert_eq!(parse_benchmark("expsin").unwrap().id(), "expsin");
        assert_eq!(parse_benchmark("cubic-bvp:n=50").unwrap().id(), "cubic-bvp:n=50");
        assert_eq!(parse_benchmark("bratu").unwrap().id(), "bratu:n=100");
        assert!(matches!(parse_benchmark("quartic"), Err(RegistryError::UnknownProblem(_))));
        assert!(matches!(parse_benchmark("bratu:m=3"), Err(RegistryError::BadParameter { .. })));
        assert!(matches!(parse_benchmark("cubic:n=3"), Err(RegistryError::BadParameter { .. })));
        assert!(matches!(parse_benchmark("cubic-bvp:n=1"), Err(RegistryError::MeshTooSmall { .. })));
    }

    #[test]
    fn bvp_guess_mapping() {
        let b = BvpBenchmark::cubic(100);
        let g = b.initial_guess(0.5, -2.405);
        assert_eq!(g[49], -2.405);
        assert!((g[24] + 2.405 / 2.0).abs() < 1e-12);
        assert!((bvp1d::integral_value(&b.bvp().function(&g)) + 2.405 / 2.0).abs() < 1e-12);
        let nodal = BvpBenchmark::cubic(100).with_guess(GuessShape::Nodal).initial_guess(0.5, -2.405);
        assert_eq!(nodal.iter().filter(|v| **v != 0.0).count(), 1);
    }
}
