//! Piecewise-linear finite elements for `u'' + g(u) = 0` on `(0, 1)` with
//! homogeneous Dirichlet data, for `g(u) = u³` and the Bratu nonlinearity
//! `g(u) = e^{u+1}`.
//!
//! Unknowns are the interior nodal values. The discrete residual is
//! `F_i(u) = ∫ u' φ_i' - ∫ g(u) φ_i`; the stiffness part is exact and the
//! nonlinear load uses 3-point Gauss quadrature per element, which is exact
//! for `u³` with piecewise-linear `u`.

use std::f64::consts::{PI, SQRT_2};

use thiserror::Error;

use crate::linalg::TridiagonalMatrix;
use crate::problem::{Jacobian, NonlinearProblem};
use crate::problems::algebraic::bisect;

/// Integral-value classification window.
pub const DEFAULT_CLASSIFY_TOL: f64 = 0.1;
pub const DEFAULT_MESH_N: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Bvp1dError {
    #[error("node index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
}

/// Gauss–Legendre points and weights on the reference element `[0, 1]`.
pub(crate) const GAUSS3: [(f64, f64); 3] = [
    (0.5 - 0.387_298_334_620_741_7, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.5 + 0.387_298_334_620_741_7, 5.0 / 18.0),
];

/// Uniform mesh of `(0, 1)` with `n` subintervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh1D {
    n: usize,
}

impl Mesh1D {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "mesh needs at least two subintervals");
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn interior_len(&self) -> usize {
        self.n - 1
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }
}

/// A P1 function given by its interior nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct FemFunction {
    pub mesh: Mesh1D,
    pub values: Vec<f64>,
}

impl FemFunction {
    pub fn new(mesh: Mesh1D, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.interior_len());
        Self { mesh, values }
    }

    pub fn zero(mesh: Mesh1D) -> Self {
        Self::new(mesh, vec![0.0; mesh.interior_len()])
    }

    /// Nodal value at node `i` in `0..=n`, including the boundary zeros.
    pub fn nodal(&self, i: usize) -> f64 {
        if i == 0 || i == self.mesh.n {
            0.0
        } else {
            self.values[i - 1]
        }
    }

    /// Point evaluation by linear interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.mesh.n;
        let xs = (x.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-12);
        let k = xs.floor() as usize;
        let xi = xs - k as f64;
        (1.0 - xi) * self.nodal(k) + xi * self.nodal(k + 1)
    }
}

/// The piecewise-linear guess that is `alpha` at node `i` and zero at all
/// other nodes.
pub fn hat_initial_guess(mesh: Mesh1D, i: usize, alpha: f64) -> Result<FemFunction, Bvp1dError> {
    let max = mesh.n - 1;
    if i == 0 || i > max {
        return Err(Bvp1dError::IndexOutOfRange { index: i, max });
    }
    let mut u = FemFunction::zero(mesh);
    u.values[i - 1] = alpha;
    Ok(u)
}

/// The piecewise-linear tent through `(0, 0)`, `(ih, alpha)` and `(1, 0)`,
/// sampled at the mesh nodes.
pub fn tent_initial_guess(mesh: Mesh1D, i: usize, alpha: f64) -> Result<FemFunction, Bvp1dError> {
    let max = mesh.n - 1;
    if i == 0 || i > max {
        return Err(Bvp1dError::IndexOutOfRange { index: i, max });
    }
    let values = (1..mesh.n)
        .map(|k| if k <= i { alpha * k as f64 / i as f64 } else { alpha * (mesh.n - k) as f64 / (mesh.n - i) as f64 })
        .collect();
    Ok(FemFunction::new(mesh, values))
}

/// Nearest interior node to the coordinate `s ∈ [0, 1]`.
pub fn node_for_coordinate(mesh: Mesh1D, s: f64) -> usize {
    let i = (s * mesh.n as f64).round();
    (i.max(1.0) as usize).min(mesh.n - 1)
}

/// Exact integral of a P1 function with zero boundary values.
pub fn integral_value(u: &FemFunction) -> f64 {
    u.mesh.h() * u.values.iter().sum::<f64>()
}

/// Discrete L² norm `sqrt(h Σ v_i²)` of an interior coefficient vector.
pub fn discrete_l2(h: f64, v: &[f64]) -> f64 {
    (h * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Norm on interior coefficient vectors used by the step-size controller
/// and the convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientNorm {
    /// `sqrt(h Σ v_i²)`.
    L2,
    /// `sqrt(Σ v_i²)`.
    Euclidean,
}

/// Nonlinear reaction term `g(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reaction {
    /// `g(u) = u³`
    Cubic,
    /// `g(u) = e^{u+1}`
    Bratu,
}

impl Reaction {
    fn value(self, u: f64) -> f64 {
        match self {
            Reaction::Cubic => u * u * u,
            Reaction::Bratu => (u + 1.0).exp(),
        }
    }

    fn derivative(self, u: f64) -> f64 {
        match self {
            Reaction::Cubic => 3.0 * u * u,
            Reaction::Bratu => (u + 1.0).exp(),
        }
    }
}

fn assemble_residual(reaction: Reaction, u: &FemFunction) -> Vec<f64> {
    let mesh = u.mesh;
    let (n, h) = (mesh.n, mesh.h());
    let mut f = vec![0.0; n - 1];
    for i in 1..n {
        f[i - 1] = (2.0 * u.nodal(i) - u.nodal(i - 1) - u.nodal(i + 1)) / h;
    }
    for k in 0..n {
        let (ua, ub) = (u.nodal(k), u.nodal(k + 1));
        let (mut la, mut lb) = (0.0, 0.0);
        for (xi, w) in GAUSS3 {
            let g = reaction.value((1.0 - xi) * ua + xi * ub) * w * h;
            la += g * (1.0 - xi);
            lb += g * xi;
        }
        if k >= 1 {
            f[k - 1] -= la;
        }
        if k + 1 < n {
            f[k] -= lb;
        }
    }
    f
}

fn assemble_jacobian(reaction: Reaction, u: &FemFunction) -> TridiagonalMatrix {
    let mesh = u.mesh;
    let (n, h) = (mesh.n, mesh.h());
    let m = n - 1;
    let mut diag = vec![2.0 / h; m];
    let mut off = vec![-1.0 / h; m.saturating_sub(1)];
    for k in 0..n {
        let (ua, ub) = (u.nodal(k), u.nodal(k + 1));
        let (mut aa, mut ab, mut bb) = (0.0, 0.0, 0.0);
        for (xi, w) in GAUSS3 {
            let dg = reaction.derivative((1.0 - xi) * ua + xi * ub) * w * h;
            aa += dg * (1.0 - xi) * (1.0 - xi);
            ab += dg * (1.0 - xi) * xi;
            bb += dg * xi * xi;
        }
        if k >= 1 {
            diag[k - 1] -= aa;
        }
        if k + 1 < n {
            diag[k] -= bb;
        }
        if k >= 1 && k + 1 < n {
            off[k - 1] -= ab;
        }
    }
    TridiagonalMatrix::new(off.clone(), diag, off)
}

pub fn cubic_bvp_residual(u: &FemFunction) -> Vec<f64> {
    assemble_residual(Reaction::Cubic, u)
}

pub fn cubic_bvp_jacobian(u: &FemFunction) -> TridiagonalMatrix {
    assemble_jacobian(Reaction::Cubic, u)
}

pub fn bratu_residual(u: &FemFunction) -> Vec<f64> {
    assemble_residual(Reaction::Bratu, u)
}

pub fn bratu_jacobian(u: &FemFunction) -> TridiagonalMatrix {
    assemble_jacobian(Reaction::Bratu, u)
}

/// Discretized boundary-value problem on a fixed mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bvp1dProblem {
    pub mesh: Mesh1D,
    pub reaction: Reaction,
    pub norm: CoefficientNorm,
}

impl Bvp1dProblem {
    pub fn cubic(n: usize) -> Self {
        Self { mesh: Mesh1D::new(n), reaction: Reaction::Cubic, norm: CoefficientNorm::L2 }
    }

    pub fn bratu(n: usize) -> Self {
        Self { mesh: Mesh1D::new(n), reaction: Reaction::Bratu, norm: CoefficientNorm::L2 }
    }

    pub fn with_norm(mut self, norm: CoefficientNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn function(&self, values: &[f64]) -> FemFunction {
        FemFunction::new(self.mesh, values.to_vec())
    }
}

impl NonlinearProblem for Bvp1dProblem {
    fn dim(&self) -> usize {
        self.mesh.interior_len()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        assemble_residual(self.reaction, &self.function(x))
    }

    fn jacobian(&self, x: &[f64]) -> Jacobian {
        Jacobian::Tridiagonal(assemble_jacobian(self.reaction, &self.function(x)))
    }

    fn norm(&self, v: &[f64]) -> f64 {
        match self.norm {
            CoefficientNorm::L2 => discrete_l2(self.mesh.h(), v),
            CoefficientNorm::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

/// Named solutions identified by their integral over `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionLabels1D {
    pub names: Vec<String>,
    pub targets: Vec<f64>,
}

impl SolutionLabels1D {
    /// `u₀, u₊, u₋` with integrals `0, π/√2, -π/√2`.
    pub fn cubic() -> Self {
        let i = PI / SQRT_2;
        Self { names: vec!["u0".into(), "u+".into(), "u-".into()], targets: vec![0.0, i, -i] }
    }

    /// `u₁` (small, θ₁) and `u₂` (large, θ₂) from the closed-form solutions.
    pub fn bratu() -> Self {
        let (t1, t2) = bratu_theta_roots();
        Self {
            names: vec!["u1".into(), "u2".into()],
            targets: vec![bratu_exact_integral(t1), bratu_exact_integral(t2)],
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Smallest gap between two targets.
    pub fn separation(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.targets.iter().enumerate() {
            for b in &self.targets[i + 1..] {
                gap = gap.min((a - b).abs());
            }
        }
        gap
    }

    /// Index of the nearest target within `tol` of `integral`.
    pub fn classify_integral(&self, integral: f64, tol: f64) -> Option<usize> {
        self.targets
            .iter()
            .enumerate()
            .map(|(k, t)| (k, (t - integral).abs()))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
    }

    /// `min_k |I_k - integral|`.
    pub fn integral_error(&self, integral: f64) -> f64 {
        self.targets.iter().map(|t| (t - integral).abs()).fold(f64::INFINITY, f64::min)
    }
}

pub fn classify_1d(u: &FemFunction, labels: &SolutionLabels1D, tol: f64) -> Option<usize> {
    labels.classify_integral(integral_value(u), tol)
}

/// The defining function `θ - sqrt(2e) cosh(θ/4)` of the Bratu parameter.
pub fn bratu_theta_equation(theta: f64) -> f64 {
    theta - (2.0 * std::f64::consts::E).sqrt() * (theta / 4.0).cosh()
}

/// Both roots `θ₁ < θ₂` of [`bratu_theta_equation`], bisected from integer brackets.
pub fn bratu_theta_roots() -> (f64, f64) {
    let mut roots = Vec::with_capacity(2);
    for k in 0..20 {
        let (a, b) = (k as f64, k as f64 + 1.0);
        if bratu_theta_equation(a).signum() != bratu_theta_equation(b).signum() {
            roots.push(bisect(bratu_theta_equation, a, b, 1e-13));
        }
    }
    assert_eq!(roots.len(), 2, "expected exactly two Bratu parameters");
    (roots[0], roots[1])
}

/// Closed-form Bratu solution `-2 ln(cosh((x - 1/2) θ/2) / cosh(θ/4))`.
pub fn bratu_exact(x: f64, theta: f64) -> f64 {
    -2.0 * (((x - 0.5) * theta / 2.0).cosh() / (theta / 4.0).cosh()).ln()
}

/// `∫₀¹ bratu_exact(x, θ) dx` by composite Simpson with 2000 panels.
pub fn bratu_exact_integral(theta: f64) -> f64 {
    let m = 2000;
    let h = 1.0 / m as f64;
    let mut s = bratu_exact(0.0, theta) + bratu_exact(1.0, theta);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * bratu_exact(k as f64 * h, theta);
    }
    s * h / 3.0
}

/// Nodal interpolant of the closed-form Bratu solution.
pub fn bratu_interpolant(mesh: Mesh1D, theta: f64) -> FemFunction {
    let values = (1..mesh.n).map(|i| bratu_exact(mesh.node(i), theta)).collect();
    FemFunction::new(mesh, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::jacobian_mismatch;

    fn hat_area_oracle(mesh: Mesh1D, alpha: f64) -> f64 {
        alpha * (2.0 * mesh.h()) / 2.0
    }

    #[test]
    fn zero_function_is_the_trivial_solution() {
        let u = FemFunction::zero(Mesh1D::new(10));
        assert!(cubic_bvp_residual(&u).iter().all(|v| *v == 0.0));
        assert_eq!(integral_value(&u), 0.0);
        assert_eq!(classify_1d(&u, &SolutionLabels1D::cubic(), 0.1), Some(0));
    }

    #[test]
    fn jacobian_at_zero_is_stiffness() {
        let mesh = Mesh1D::new(8);
        let h = mesh.h();
        let j = cubic_bvp_jacobian(&FemFunction::zero(mesh));
        assert_eq!(j, TridiagonalMatrix::constant(7, -1.0 / h, 2.0 / h, -1.0 / h));
    }

    #[test]
    fn bratu_at_zero() {
        let mesh = Mesh1D::new(10);
        let h = mesh.h();
        let e = std::f64::consts::E;
        let f = bratu_residual(&FemFunction::zero(mesh));
        assert!(f.iter().all(|v| (v + e * h).abs() < 1e-14));
        let j = bratu_jacobian(&FemFunction::zero(mesh));
        for d in &j.diag {
            assert!((d - (2.0 / h - e * 2.0 * h / 3.0)).abs() < 1e-12);
        }
        for o in j.lower.iter().chain(&j.upper) {
            assert!((o - (-1.0 / h - e * h / 6.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn hat_guess() {
        let mesh = Mesh1D::new(100);
        let u = hat_initial_guess(mesh, 50, -2.405).unwrap();
        assert_eq!(u.nodal(50), -2.405);
        assert_eq!(u.values.iter().filter(|v| **v != 0.0).count(), 1);
        assert!((integral_value(&u) - hat_area_oracle(mesh, -2.405)).abs() < 1e-15);
        assert!(hat_initial_guess(mesh, 3, 0.0).unwrap().values.iter().all(|v| *v == 0.0));
        assert_eq!(hat_initial_guess(mesh, 0, 1.0), Err(Bvp1dError::IndexOutOfRange { index: 0, max: 99 }));
        assert!(hat_initial_guess(mesh, 100, 1.0).is_err());
        assert!((u.eval(0.505) + 2.405 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn node_mapping_clamps() {
        let mesh = Mesh1D::new(100);
        assert_eq!(node_for_coordinate(mesh, 0.5), 50);
        assert_eq!(node_for_coordinate(mesh, 0.0), 1);
        assert_eq!(node_for_coordinate(mesh, 1.0), 99);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        for p in [Bvp1dProblem::cubic(12), Bvp1dProblem::bratu(12)] {
            let x: Vec<f64> = (0..11).map(|i| (i as f64 * 0.7).sin() * 2.0).collect();
            assert!(jacobian_mismatch(&p, &x) < 1e-6);
        }
    }

    #[test]
    fn classification_windows() {
        let labels = SolutionLabels1D::cubic();
        assert_eq!(labels.classify_integral(1.0, 0.1), None);
        assert_eq!(labels.classify_integral(-2.2, 0.1), Some(2));
        assert!(labels.separation() > 0.2);
        assert!((labels.integral_error(2.0) - (PI / SQRT_2 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn bratu_closed_form_boundary_and_peak() {
        let (t1, t2) = bratu_theta_roots();
        for t in [t1, t2] {
            assert!(bratu_exact(0.0, t).abs() < 1e-15);
            assert!(bratu_exact(1.0, t).abs() < 1e-15);
            let peak = bratu_exact(0.5, t);
            assert!((peak - 2.0 * (t / 4.0).cosh().ln()).abs() < 1e-14);
            assert!(peak > 0.0);
        }
        let labels = SolutionLabels1D::bratu();
        assert!(labels.targets[0] < labels.targets[1]);
        assert!(labels.separation() > 0.2);
    }
}
