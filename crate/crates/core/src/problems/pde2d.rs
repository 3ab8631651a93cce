//! `Δu + u³ = 0` on the unit square with zero boundary values, discretized
//! by the 5-point stencil.
//!
//! The residual at interior node `p` is scaled by `h²` so that the
//! Jacobian is the symmetric matrix `(4I - neighbours) - 3h² diag(u²)`:
//!
//! ```text
//! F_p(u) = 4u_p - Σ_{q ~ p} u_q - h² u_p³
//! ```

use crate::flow::{flow, FlowConfig};
use crate::linalg::SparseMatrix;
use crate::problem::{Jacobian, NonlinearProblem};
use crate::solver::{solve, Mode, SolverConfig};

pub const DEFAULT_CLASSIFY_TOL: f64 = 0.1;
/// Grid used for basin slices.
pub const DEFAULT_SLICE_N: usize = 32;

/// Uniform grid of `[0, 1]²` with `n` cells per side; `(n-1)²` unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2D {
    n: usize,
}

impl Grid2D {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "grid needs at least three cells per side");
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Interior nodes per side.
    pub fn side(&self) -> usize {
        self.n - 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of interior node `(ix, iy)`, both in `1..n`; `iy` selects the row.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        (iy - 1) * self.side() + (ix - 1)
    }

    pub fn coords(&self, p: usize) -> (f64, f64) {
        let m = self.side();
        (((p % m) + 1) as f64 * self.h(), ((p / m) + 1) as f64 * self.h())
    }
}

/// Interior nodal values, row-major in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl GridFunction2D {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zero(grid: Grid2D) -> Self {
        Self::new(grid, vec![0.0; grid.len()])
    }

    /// Value at node `(ix, iy)` in `0..=n`, zero on the boundary.
    pub fn nodal(&self, ix: usize, iy: usize) -> f64 {
        let n = self.grid.n;
        if ix == 0 || iy == 0 || ix == n || iy == n {
            0.0
        } else {
            self.values[self.grid.index(ix, iy)]
        }
    }
}

fn residual_values(grid: Grid2D, u: &[f64]) -> Vec<f64> {
    let m = grid.side();
    let h2 = grid.h() * grid.h();
    let mut f = vec![0.0; u.len()];
    for iy in 0..m {
        for ix in 0..m {
            let p = iy * m + ix;
            let mut lap = 4.0 * u[p];
            if ix > 0 {
                lap -= u[p - 1];
            }
            if ix + 1 < m {
                lap -= u[p + 1];
            }
            if iy > 0 {
                lap -= u[p - m];
            }
            if iy + 1 < m {
                lap -= u[p + m];
            }
            f[p] = lap - h2 * u[p] * u[p] * u[p];
        }
    }
    f
}

fn jacobian_matrix(grid: Grid2D, u: &[f64]) -> SparseMatrix {
    let m = grid.side();
    let len = m * m;
    let h2 = grid.h() * grid.h();
    let mut offsets = Vec::with_capacity(len + 1);
    let mut columns = Vec::with_capacity(5 * len);
    let mut values = Vec::with_capacity(5 * len);
    offsets.push(0);
    for iy in 0..m {
        for ix in 0..m {
            let p = iy * m + ix;
            if iy > 0 {
                columns.push(p - m);
                values.push(-1.0);
            }
            if ix > 0 {
                columns.push(p - 1);
                values.push(-1.0);
            }
            columns.push(p);
            values.push(4.0 - 3.0 * h2 * u[p] * u[p]);
            if ix + 1 < m {
                columns.push(p + 1);
                values.push(-1.0);
            }
            if iy + 1 < m {
                columns.push(p + m);
                values.push(-1.0);
            }
            offsets.push(columns.len());
        }
    }
    SparseMatrix::from_csr(len, offsets, columns, values)
}

pub fn pde_residual(u: &GridFunction2D) -> Vec<f64> {
    residual_values(u.grid, &u.values)
}

pub fn pde_jacobian(u: &GridFunction2D) -> SparseMatrix {
    jacobian_matrix(u.grid, &u.values)
}

/// Discrete integral `h² Σ u_p`.
pub fn grid_integral(grid: Grid2D, values: &[f64]) -> f64 {
    grid.h() * grid.h() * values.iter().sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicPdeProblem {
    pub grid: Grid2D,
}

impl CubicPdeProblem {
    pub fn new(n: usize) -> Self {
        Self { grid: Grid2D::new(n) }
    }
}

impl NonlinearProblem for CubicPdeProblem {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        residual_values(self.grid, x)
    }

    fn jacobian(&self, x: &[f64]) -> Jacobian {
        Jacobian::Sparse(jacobian_matrix(self.grid, x))
    }

    /// Discrete L² norm `sqrt(h² Σ v_p²)`.
    fn norm(&self, v: &[f64]) -> f64 {
        self.grid.h() * v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Hill-shaped initial-guess parameters. `k` and `j` place the peak along
/// `x` and `y`; they may be fractional so slices can be sampled finer than
/// the grid. `amplitude` is the peak value after normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillParams {
    pub k: f64,
    pub j: f64,
    pub n: usize,
    pub amplitude: f64,
}

/// `φ(x, y) = (x/(x+ε))^k (y/(y+ε))^j ((1-x)/(1-x+ε))^{n-k} ((1-y)/(1-y+ε))^{n-j}`, `ε = 1/n`.
pub fn hill_function(p: &HillParams, x: f64, y: f64) -> f64 {
    let n = p.n as f64;
    let eps = 1.0 / n;
    let factor = |t: f64, e: f64| (t / (t + eps)).powf(e);
    factor(x, p.k) * factor(y, p.j) * factor(1.0 - x, n - p.k) * factor(1.0 - y, n - p.j)
}

/// Nodal samples of `amplitude · φ / max φ`, the maximum taken over grid nodes.
pub fn hill_initial_guess(p: &HillParams, grid: Grid2D) -> GridFunction2D {
    let raw: Vec<f64> = (0..grid.len())
        .map(|q| {
            let (x, y) = grid.coords(q);
            hill_function(p, x, y)
        })
        .collect();
    let peak = raw.iter().copied().fold(0.0, f64::max);
    if p.amplitude == 0.0 || peak == 0.0 {
        return GridFunction2D::zero(grid);
    }
    GridFunction2D::new(grid, raw.into_iter().map(|v| p.amplitude * v / peak).collect())
}

/// Labels `u₀, u₊, u₋` identified by discrete integral `0, I₊, -I₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeLabels {
    pub positive_integral: f64,
}

impl PdeLabels {
    pub const NAMES: [&'static str; 3] = ["u0", "u+", "u-"];

    pub fn targets(&self) -> [f64; 3] {
        [0.0, self.positive_integral, -self.positive_integral]
    }

    pub fn classify_integral(&self, integral: f64, tol: f64) -> Option<usize> {
        self.targets()
            .iter()
            .enumerate()
            .map(|(k, t)| (k, (t - integral).abs()))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
    }

    pub fn integral_error(&self, integral: f64) -> f64 {
        self.targets().iter().map(|t| (t - integral).abs()).fold(f64::INFINITY, f64::min)
    }
}

pub fn classify_2d(u: &GridFunction2D, labels: &PdeLabels, tol: f64) -> Option<usize> {
    labels.classify_integral(grid_integral(u.grid, &u.values), tol)
}

/// The positive solution, reached by following the Newton flow from a
/// centred hill of height 4 and finishing with full Newton steps.
pub fn positive_solution(grid: Grid2D) -> GridFunction2D {
    let problem = CubicPdeProblem { grid };
    let c = grid.n() as f64 / 2.0;
    let guess = hill_initial_guess(&HillParams { k: c, j: c, n: grid.n(), amplitude: 4.0 }, grid);
    let traj = flow(&problem, &guess.values, &FlowConfig { dt: 0.05, t_max: 20.0, residual_stop: 1e-4 });
    let trace = solve(&problem, traj.final_state(), &SolverConfig::new(Mode::Classical).with_max_iters(50));
    assert!(trace.converged(), "positive solution did not converge: {:?}", trace.status);
    GridFunction2D::new(grid, trace.final_state().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_sparse_spd;
    use crate::problem::jacobian_mismatch;

    #[test]
    fn zero_is_a_solution_and_jacobian_is_laplacian() {
        let g = Grid2D::new(4);
        let u = GridFunction2D::zero(g);
        assert!(pde_residual(&u).iter().all(|v| *v == 0.0));
        let j = pde_jacobian(&u);
        assert!(j.is_symmetric(0.0));
        assert_eq!(j.get(4, 4), 4.0);
        assert_eq!(j.get(4, 1), -1.0);
        assert!(solve_sparse_spd(&j, &[1.0; 9], 1e-10).is_ok());
    }

    #[test]
    fn spike_against_dense_stencil() {
        // Dense oracle: apply the stencil through nodal lookups with explicit boundary zeros.
        let g = Grid2D::new(4);
        let a = 1.7;
        let mut u = GridFunction2D::zero(g);
        u.values[g.index(2, 2)] = a;
        let f = pde_residual(&u);
        let h2 = g.h() * g.h();
        for iy in 1..4 {
            for ix in 1..4 {
                let c = u.nodal(ix, iy);
                let expected = 4.0 * c
                    - u.nodal(ix - 1, iy)
                    - u.nodal(ix + 1, iy)
                    - u.nodal(ix, iy - 1)
                    - u.nodal(ix, iy + 1)
                    - h2 * c * c * c;
                assert!((f[g.index(ix, iy)] - expected).abs() < 1e-15);
            }
        }
        assert!((f[g.index(2, 2)] - (4.0 * a - h2 * a * a * a)).abs() < 1e-15);
    }

    #[test]
    fn residual_is_odd() {
        let g = Grid2D::new(5);
        let values: Vec<f64> = (0..g.len()).map(|p| (p as f64).sin() * 3.0).collect();
        let neg: Vec<f64> = values.iter().map(|v| -v).collect();
        let f = residual_values(g, &values);
        let fneg = residual_values(g, &neg);
        assert!(f.iter().zip(&fneg).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = CubicPdeProblem::new(5);
        let x: Vec<f64> = (0..16).map(|q| (q as f64 * 1.3).cos() * 4.0).collect();
        assert!(jacobian_mismatch(&p, &x) < 1e-6);
        assert!(pde_jacobian(&GridFunction2D::new(p.grid, x)).is_symmetric(0.0));
    }

    #[test]
    fn hill_vanishes_on_boundary_and_is_symmetric() {
        let p = HillParams { k: 5.0, j: 5.0, n: 10, amplitude: 1.0 };
        for t in [0.0, 0.3, 0.8, 1.0] {
            assert_eq!(hill_function(&p, 0.0, t), 0.0);
            assert_eq!(hill_function(&p, 1.0, t), 0.0);
            assert_eq!(hill_function(&p, t, 0.0), 0.0);
        }
        let (a, b) = (hill_function(&p, 0.2, 0.7), hill_function(&p, 0.7, 0.2));
        assert!((a - b).abs() <= 1e-14 * a.abs());
    }

    #[test]
    fn hill_guess_normalization() {
        let g = Grid2D::new(16);
        let zero = hill_initial_guess(&HillParams { k: 8.0, j: 8.0, n: 16, amplitude: 0.0 }, g);
        assert!(zero.values.iter().all(|v| *v == 0.0));
        let u = hill_initial_guess(&HillParams { k: 8.0, j: 8.0, n: 16, amplitude: 8.0 }, g);
        assert_eq!(u.nodal(8, 8), 8.0);
        let peak = u.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(peak, 8.0);
        let v = hill_initial_guess(&HillParams { k: 3.0, j: 11.0, n: 16, amplitude: -2.5 }, g);
        let low = v.values.iter().fold(0.0f64, |m, x| m.min(*x));
        assert!((low + 2.5).abs() < 1e-15);
    }

    #[test]
    fn classification() {
        let labels = PdeLabels { positive_integral: 1.5 };
        let g = Grid2D::new(4);
        assert_eq!(classify_2d(&GridFunction2D::zero(g), &labels, 0.1), Some(0));
        assert_eq!(labels.classify_integral(0.75, 0.1), None);
        assert_eq!(labels.classify_integral(-1.45, 0.1), Some(2));
    }
}
