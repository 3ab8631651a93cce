//! The nonlinear-system abstraction shared by every solver mode.

use crate::linalg::{self, DenseMatrix, LinalgError, SparseMatrix, TridiagonalMatrix};

/// Derivative `F'(x)` in whichever storage suits the problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Jacobian {
    Dense(DenseMatrix),
    Tridiagonal(TridiagonalMatrix),
    Sparse(SparseMatrix),
}

impl Jacobian {
    pub fn dim(&self) -> usize {
        match self {
            Jacobian::Dense(m) => m.rows(),
            Jacobian::Tridiagonal(m) => m.dim(),
            Jacobian::Sparse(m) => m.dim(),
        }
    }

    /// Solves `J d = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        match self {
            Jacobian::Dense(m) => linalg::solve_dense(m, rhs),
            Jacobian::Tridiagonal(m) => linalg::solve_tridiagonal(m, rhs),
            Jacobian::Sparse(m) => linalg::solve_sparse_spd(m, rhs, linalg::CG_TOLERANCE),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Jacobian::Dense(m) => m.mul_vec(v),
            Jacobian::Tridiagonal(m) => m.mul_vec(v),
            Jacobian::Sparse(m) => m.mul_vec(v),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Jacobian::Dense(m) => m.clone(),
            Jacobian::Tridiagonal(m) => m.to_dense(),
            Jacobian::Sparse(m) => m.to_dense(),
        }
    }
}

/// A finite-dimensional operator equation `F(x) = 0` on a domain `Ω`.
///
/// Implementations must be immutable after construction; solvers call them
/// concurrently from many threads.
pub trait NonlinearProblem: Sync {
    fn dim(&self) -> usize;

    fn residual(&self, x: &[f64]) -> Vec<f64>;

    fn jacobian(&self, x: &[f64]) -> Jacobian;

    /// Membership in `Ω`. Defaults to the whole space.
    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }

    /// The state-space norm used by the step-size rule and stopping tests.
    fn norm(&self, v: &[f64]) -> f64 {
        linalg::euclidean_norm(v)
    }
}

impl<P: NonlinearProblem + ?Sized> NonlinearProblem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        (**self).residual(x)
    }
    fn jacobian(&self, x: &[f64]) -> Jacobian {
        (**self).jacobian(x)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        (**self).in_domain(x)
    }
    fn norm(&self, v: &[f64]) -> f64 {
        (**self).norm(v)
    }
}

/// Affine test problem `F(x) = A x - b`.
#[derive(Debug, Clone)]
pub struct AffineProblem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl NonlinearProblem for AffineProblem {
    fn dim(&self) -> usize {
        self.rhs.len()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x).iter().zip(&self.rhs).map(|(a, b)| a - b).collect()
    }

    fn jacobian(&self, _x: &[f64]) -> Jacobian {
        Jacobian::Dense(self.matrix.clone())
    }
}

/// Central-difference approximation of the Jacobian, column by column.
pub fn finite_difference_jacobian<P: NonlinearProblem + ?Sized>(p: &P, x: &[f64], step: f64) -> DenseMatrix {
    let n = p.dim();
    let mut m = DenseMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    for c in 0..n {
        let h = step * x[c].abs().max(1.0);
        xp[c] = x[c] + h;
        let fp = p.residual(&xp);
        xp[c] = x[c] - h;
        let fm = p.residual(&xp);
        xp[c] = x[c];
        for r in 0..n {
            m[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    m
}

/// Largest entrywise deviation between the analytic and finite-difference
/// Jacobians, relative to the largest analytic entry (floored at 1).
pub fn jacobian_mismatch<P: NonlinearProblem + ?Sized>(p: &P, x: &[f64]) -> f64 {
    let analytic = p.jacobian(x).to_dense();
    let fd = finite_difference_jacobian(p, x, 1e-6);
    let scale = analytic.entries().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    analytic
        .entries()
        .iter()
        .zip(fd.entries())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}
