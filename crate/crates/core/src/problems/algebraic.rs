//! Two-dimensional algebraic benchmarks: the complex cubic `z³ - 2z - 4`
//! and the exp/sin system on `[-1.5, 1.5]²`.

use crate::linalg::{DenseMatrix, PIVOT_THRESHOLD};
use crate::problem::{Jacobian, NonlinearProblem};

/// Root identification radius after convergence.
pub const ROOT_MATCH_RADIUS: f64 = 1e-3;

/// Known zeros of a problem, each with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCatalog {
    roots: Vec<(String, Vec<f64>)>,
    match_radius: f64,
}

impl RootCatalog {
    pub fn new(roots: Vec<(String, Vec<f64>)>, match_radius: f64) -> Self {
        assert!(match_radius > 0.0);
        for (i, (_, a)) in roots.iter().enumerate() {
            for (_, b) in &roots[i + 1..] {
                assert!(distance(a, b) > 2.0 * match_radius, "roots closer than twice the match radius");
            }
        }
        Self { roots, match_radius }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn match_radius(&self) -> f64 {
        self.match_radius
    }

    pub fn label(&self, i: usize) -> &str {
        &self.roots[i].0
    }

    pub fn root(&self, i: usize) -> &[f64] {
        &self.roots[i].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.roots.iter().map(|(l, r)| (l.as_str(), r.as_slice()))
    }

    /// Index of the root within `match_radius` of `x`, if any.
    pub fn identify(&self, x: &[f64]) -> Option<usize> {
        self.roots.iter().position(|(_, r)| distance(r, x) <= self.match_radius)
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// `F(z) = z³ - 2z - 4` on `ℂ ≅ ℝ²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CubicProblem;

impl CubicProblem {
    pub fn roots() -> RootCatalog {
        RootCatalog::new(
            vec![
                ("2".to_string(), vec![2.0, 0.0]),
                ("-1+i".to_string(), vec![-1.0, 1.0]),
                ("-1-i".to_string(), vec![-1.0, -1.0]),
            ],
            ROOT_MATCH_RADIUS,
        )
    }

    /// The two points where `F'` vanishes.
    pub fn critical_points() -> [[f64; 2]; 2] {
        let c = (2.0f64 / 3.0).sqrt();
        [[c, 0.0], [-c, 0.0]]
    }
}

pub fn cubic_residual(x: &[f64]) -> [f64; 2] {
    let (a, b) = (x[0], x[1]);
    // z³ = (a³ - 3ab²) + i(3a²b - b³)
    [a * a * a - 3.0 * a * b * b - 2.0 * a - 4.0, 3.0 * a * a * b - b * b * b - 2.0 * b]
}

/// Real 2×2 form `[[p, -q], [q, p]]` of `F'(z) = 3z² - 2 = p + iq`.
pub fn cubic_jacobian(x: &[f64]) -> DenseMatrix {
    let (a, b) = (x[0], x[1]);
    let p = 3.0 * (a * a - b * b) - 2.0;
    let q = 6.0 * a * b;
    DenseMatrix::from_rows([[p, -q], [q, p]])
}

impl NonlinearProblem for CubicProblem {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        cubic_residual(x).to_vec()
    }

    fn jacobian(&self, x: &[f64]) -> Jacobian {
        Jacobian::Dense(cubic_jacobian(x))
    }
}

/// Half-width of the exp/sin domain `Ω = [-1.5, 1.5]²`.
pub const EXPSIN_HALF_WIDTH: f64 = 1.5;

/// `F(x, y) = (exp(x² + y²) - 3, x + y - sin(3(x + y)))` on `[-1.5, 1.5]²`.
#[derive(Debug, Clone)]
pub struct ExpSinProblem {
    roots: RootCatalog,
    bounded: bool,
}

impl Default for ExpSinProblem {
    fn default() -> Self {
        Self::new()
    }
}

impl ExpSinProblem {
    pub fn new() -> Self {
        let roots = expsin_roots()
            .into_iter()
            .enumerate()
            .map(|(i, r)| (format!("r{}", i + 1), r.to_vec()))
            .collect();
        Self { roots: RootCatalog::new(roots, ROOT_MATCH_RADIUS), bounded: true }
    }

    /// The same map without the box restriction. The formula is entire, so
    /// iterates may wander outside `Ω` and come back; only the roots inside
    /// `Ω` are catalogued.
    pub fn unbounded() -> Self {
        Self { bounded: false, ..Self::new() }
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn roots(&self) -> &RootCatalog {
        &self.roots
    }
}

pub fn expsin_residual(x: &[f64]) -> [f64; 2] {
    let s = x[0] + x[1];
    [(x[0] * x[0] + x[1] * x[1]).exp() - 3.0, s - (3.0 * s).sin()]
}

pub fn expsin_jacobian(x: &[f64]) -> DenseMatrix {
    let e = (x[0] * x[0] + x[1] * x[1]).exp();
    let c = 1.0 - 3.0 * (3.0 * (x[0] + x[1])).cos();
    DenseMatrix::from_rows([[2.0 * x[0] * e, 2.0 * x[1] * e], [c, c]])
}

pub fn in_expsin_domain(x: &[f64]) -> bool {
    x.iter().all(|v| v.abs() <= EXPSIN_HALF_WIDTH)
}

impl NonlinearProblem for ExpSinProblem {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        expsin_residual(x).to_vec()
    }

    fn jacobian(&self, x: &[f64]) -> Jacobian {
        Jacobian::Dense(expsin_jacobian(x))
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        !self.bounded || in_expsin_domain(x)
    }
}

/// Offsets `c` of the singular lines `x + y = c` that meet the domain:
/// `cos(3c) = 1/3`, i.e. `c = ±arccos(1/3)/3 + 2πk/3`.
pub fn expsin_singular_offsets() -> Vec<f64> {
    let base = (1.0f64 / 3.0).acos() / 3.0;
    let period = 2.0 * std::f64::consts::PI / 3.0;
    let reach = 2.0 * EXPSIN_HALF_WIDTH;
    let mut out = Vec::new();
    for k in -3i32..=3 {
        for c in [base + period * k as f64, -base + period * k as f64] {
            if c.abs() <= reach {
                out.push(c);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Euclidean distance to the nearest line where `det F'` vanishes:
/// `y = x` or `x + y = c` for an offset from [`expsin_singular_offsets`].
pub fn expsin_singular_distance(x: &[f64]) -> f64 {
    let diag = (x[1] - x[0]).abs() / std::f64::consts::SQRT_2;
    let s = x[0] + x[1];
    expsin_singular_offsets()
        .into_iter()
        .map(|c| (s - c).abs() / std::f64::consts::SQRT_2)
        .fold(diag, f64::min)
}

/// The six zeros inside the domain, ordered by `x + y` then `x`.
///
/// Zeros satisfy `x² + y² = ln 3` and `s = sin(3s)` for `s = x + y`; the
/// admissible `s` are bracketed on a uniform grid and bisected, then each
/// line `x + y = s` is intersected with the circle.
pub fn expsin_roots() -> Vec<[f64; 2]> {
    let g = |s: f64| s - (3.0 * s).sin();
    let radius_sq = 3.0f64.ln();
    let (lo, step, count) = (-2.0005, 1e-3, 4002);
    let mut offsets = Vec::new();
    for k in 0..count {
        let a = lo + k as f64 * step;
        let b = a + step;
        if g(a).signum() != g(b).signum() {
            offsets.push(bisect(g, a, b, 1e-15));
        }
    }
    let mut roots = Vec::new();
    for s in offsets {
        let disc = radius_sq / 2.0 - s * s / 4.0;
        if disc < 0.0 {
            continue;
        }
        for sign in [-1.0, 1.0] {
            let x = s / 2.0 + sign * disc.sqrt();
            let p = [x, s - x];
            if in_expsin_domain(&p) {
                roots.push(p);
            }
        }
    }
    roots
}

/// Bisection on a sign-changing bracket.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa.signum() != f(b).signum(), "bracket does not change sign");
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `|det F'|` small enough that elimination reports a singular pivot.
pub fn expsin_is_singular(x: &[f64]) -> bool {
    expsin_jacobian(x).determinant().abs() < PIVOT_THRESHOLD
}
