//! Per-cell solves over a rectangular grid of initial guesses, each checked
//! against the flow oracle started from the same guess.

use rayon::prelude::*;

use crate::benchmark::{Benchmark, OracleConfig, Rect};
use crate::flow::flow;
use crate::solver::{solve, Mode, SolveStatus, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub solver: SolverConfig,
    pub oracle: OracleConfig,
}

impl SamplingPlan {
    /// Plan with the benchmark's defaults for everything but the geometry and mode.
    pub fn new(bench: &dyn Benchmark, rect: Rect, nx: usize, ny: usize, mode: Mode) -> Self {
        Self { rect, nx, ny, solver: bench.solver_config(mode), oracle: bench.default_oracle() }
    }

    pub fn is_valid(&self) -> bool {
        self.nx >= 2 && self.ny >= 2 && self.rect.is_valid()
    }

    /// Parameter-plane point of cell `(ix, iy)`; row 0 is the top edge `y1`.
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        point(&self.rect, self.nx, self.ny, ix, iy)
    }
}

pub(crate) fn point(rect: &Rect, nx: usize, ny: usize, ix: usize, iy: usize) -> (f64, f64) {
    let lerp = |a: f64, b: f64, k: usize, n: usize| {
        if n <= 1 {
            0.5 * (a + b)
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    };
    (lerp(rect.x0, rect.x1, ix, nx), lerp(rect.y1, rect.y0, iy, ny))
}

/// Outcome of the discrete iteration from one initial guess.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    /// Solution reached, `None` for divergent or unclassified runs.
    pub label: Option<usize>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_step: f64,
    pub steps: Vec<f64>,
    /// Solution the flow oracle reaches, `None` when the oracle fails.
    pub oracle: Option<usize>,
    /// Converged to the oracle's solution.
    pub correct: bool,
    /// Error sequence `e_0, e_1, …` for rate fitting (correct cells only).
    pub errors: Vec<f64>,
}

impl CellRecord {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged && self.label.is_some()
    }

    /// Converged to a known solution that is not the oracle's.
    pub fn incorrect_zero(&self) -> bool {
        self.converged() && self.oracle.is_some() && !self.correct
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    pub problem_id: String,
    pub labels: Vec<String>,
    pub plan: SamplingPlan,
    /// Root locations in the parameter plane.
    pub markers: Vec<(f64, f64)>,
    /// Row-major, row 0 at the top of the parameter rectangle.
    pub cells: Vec<CellRecord>,
}

impl BasinGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &CellRecord {
        &self.cells[iy * self.plan.nx + ix]
    }
}

struct OracleResult {
    label: Option<usize>,
    state: Vec<f64>,
}

fn run_oracle(bench: &dyn Benchmark, x0: &[f64], cfg: &OracleConfig) -> OracleResult {
    let problem = bench.problem();
    let traj = flow(problem, x0, &cfg.flow);
    if !traj.converged() {
        return OracleResult { label: None, state: traj.final_state().to_vec() };
    }
    let mut state = traj.final_state().to_vec();
    if cfg.polish {
        let trace = solve(problem, &state, &SolverConfig::new(Mode::Classical).with_max_iters(25));
        if !trace.converged() {
            return OracleResult { label: None, state };
        }
        state = trace.final_state().to_vec();
    }
    OracleResult { label: bench.classify(&state), state }
}

fn evaluate_cell(bench: &dyn Benchmark, x0: &[f64], solver: &SolverConfig, oracle: &OracleResult) -> CellRecord {
    let trace = solve(bench.problem(), x0, solver);
    let label = if trace.converged() { bench.classify(trace.final_state()) } else { None };
    let correct = match (label, oracle.label) {
        (Some(a), Some(b)) => a == b && bench.same_solution(trace.final_state(), &oracle.state),
        _ => false,
    };
    let errors = match (correct, label) {
        (true, Some(l)) => trace.iterates.iter().map(|x| bench.error(x, l)).collect(),
        _ => Vec::new(),
    };
    CellRecord {
        label,
        status: trace.status,
        iterations: trace.iterations(),
        final_step: trace.steps.last().copied().unwrap_or(1.0),
        steps: trace.steps,
        oracle: oracle.label,
        correct,
        errors,
    }
}

/// Like [`sample_basin`] but without the flow oracle: cells record only
/// where the iteration ends, with `oracle = None` and `correct = false`.
/// Enough for images, much cheaper than oracle-checked sampling.
pub fn sample_labels(bench: &dyn Benchmark, rect: Rect, nx: usize, ny: usize, solver: &SolverConfig) -> BasinGrid {
    assert!(nx >= 1 && ny >= 1 && rect.is_valid(), "invalid sampling plan");
    let none = OracleResult { label: None, state: Vec::new() };
    let cells = (0..nx * ny)
        .into_par_iter()
        .map(|c| {
            let (s, t) = point(&rect, nx, ny, c % nx, c / nx);
            evaluate_cell(bench, &bench.initial_guess(s, t), solver, &none)
        })
        .collect();
    BasinGrid {
        problem_id: bench.id(),
        labels: bench.label_names(),
        plan: SamplingPlan { rect, nx, ny, solver: *solver, oracle: bench.default_oracle() },
        markers: bench.markers(),
        cells,
    }
}

/// Samples one basin grid.
pub fn sample_basin(bench: &dyn Benchmark, plan: &SamplingPlan) -> BasinGrid {
    sample_basins(bench, plan.rect, plan.nx, plan.ny, &[plan.solver], &plan.oracle).remove(0)
}

/// Samples several solver configurations over the same grid, running the
/// flow oracle once per cell. Cells are processed in parallel on the
/// current rayon pool; the output does not depend on the schedule.
pub fn sample_basins(
    bench: &dyn Benchmark,
    rect: Rect,
    nx: usize,
    ny: usize,
    solvers: &[SolverConfig],
    oracle: &OracleConfig,
) -> Vec<BasinGrid> {
    assert!(nx >= 1 && ny >= 1 && rect.is_valid(), "invalid sampling plan");
    let per_cell: Vec<Vec<CellRecord>> = (0..nx * ny)
        .into_par_iter()
        .map(|c| {
            let (s, t) = point(&rect, nx, ny, c % nx, c / nx);
            let x0 = bench.initial_guess(s, t);
            let reference = run_oracle(bench, &x0, oracle);
            solvers.iter().map(|cfg| evaluate_cell(bench, &x0, cfg, &reference)).collect()
        })
        .collect();
    let labels = bench.label_names();
    let markers = bench.markers();
    solvers
        .iter()
        .enumerate()
        .map(|(k, cfg)| BasinGrid {
            problem_id: bench.id(),
            labels: labels.clone(),
            plan: SamplingPlan { rect, nx, ny, solver: *cfg, oracle: *oracle },
            markers: markers.clone(),
            cells: per_cell.iter().map(|cells| cells[k].clone()).collect(),
        })
        .collect()
}
