use newtonlab::linalg::solve_dense;
use newtonlab::problems::algebraic::{
    cubic_jacobian, cubic_residual, expsin_jacobian, expsin_residual, expsin_roots, expsin_singular_distance, expsin_singular_offsets,
    in_expsin_domain, CubicProblem, ExpSinProblem,
};
use newtonlab::{solve, Mode, SolveStatus, SolverConfig};
use proptest::prelude::*;

/// Residuals this small are rounding noise of the `exp(·) - 3` evaluation.
const RESIDUAL_FLOOR: f64 = 1e-14;

fn halton(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

#[test]
fn expsin_roots_from_independent_multistart() {
    // Oracle: classical Newton from a 31×31 grid in Ω, collecting distinct limits.
    let p = ExpSinProblem::new();
    let mut found: Vec<[f64; 2]> = Vec::new();
    for i in 0..31 {
        for j in 0..31 {
            let x0 = [-1.5 + 0.1 * i as f64, -1.5 + 0.1 * j as f64];
            let t = solve(&p, &x0, &SolverConfig::new(Mode::Classical));
            if !t.converged() {
                continue;
            }
            let r = [t.final_state()[0], t.final_state()[1]];
            if in_expsin_domain(&r) && !found.iter().any(|q| (q[0] - r[0]).hypot(q[1] - r[1]) < 1e-6) {
                found.push(r);
            }
        }
    }
    let roots = expsin_roots();
    assert_eq!(found.len(), 6);
    assert_eq!(roots.len(), 6);
    for r in &roots {
        let f = expsin_residual(r);
        assert!(f[0].abs() <= 1e-10 && f[1].abs() <= 1e-10);
        assert!(found.iter().any(|q| (q[0] - r[0]).hypot(q[1] - r[1]) < 1e-8));
    }
}

#[test]
fn singular_lines_and_determinant() {
    for c in expsin_singular_offsets() {
        for k in 0..20 {
            let x = -1.5 + 3.0 * k as f64 / 19.0;
            let p = [x, c - x];
            if !in_expsin_domain(&p) {
                continue;
            }
            let det = expsin_jacobian(&p).determinant();
            let scale = (p[0] * p[0] + p[1] * p[1]).exp();
            assert!(det.abs() <= 1e-10 * scale, "det {det} at {p:?}");
            assert!(expsin_singular_distance(&p) < 1e-12);
        }
    }
    for k in 0..20 {
        let x = -1.5 + 3.0 * k as f64 / 19.0;
        let scale = (2.0 * x * x).exp();
        assert!(expsin_jacobian(&[x, x]).determinant().abs() <= 1e-10 * scale);
    }
    let c = (1.0f64 / 3.0).acos() / 3.0;
    assert!(expsin_singular_distance(&[0.3, -0.3 + c]) < 1e-12);
    assert_eq!(expsin_singular_distance(&[0.0, 0.0]), 0.0);
}

#[test]
fn determinant_bounded_away_from_singular_set() {
    let mut min_det = f64::INFINITY;
    for i in 1..200 {
        let p = [-1.5 + 3.0 * halton(i, 2), -1.5 + 3.0 * halton(i, 3)];
        if expsin_singular_distance(&p) >= 0.1 {
            min_det = min_det.min(expsin_jacobian(&p).determinant().abs());
        }
    }
    assert!(min_det > 1e-2, "{min_det}");
}

#[test]
fn singular_starts_stop_immediately() {
    let t = solve(&ExpSinProblem::new(), &[0.4, 0.4], &SolverConfig::new(Mode::Classical));
    assert_eq!(t.status, SolveStatus::Singular);
    assert_eq!(t.iterates.len(), 1);
}

/// For small enough τ every step reduces the residual. The admissible τ
/// depends on the trace (through bounds on `F'⁻¹` and `F''`), so the check
/// uses a τ well below the one of the benchmark tables.
#[test]
fn residual_contracts_for_small_tau() {
    let p = ExpSinProblem::new();
    let cfg = SolverConfig::new(Mode::Adaptive { tau: 1e-6 }).with_max_iters(100_000);
    let mut checked = 0;
    for i in 1..=200 {
        let x0 = [1.5 * halton(i, 2), -1.5 * halton(i, 3)];
        let t = solve(&p, &x0, &cfg);
        if t.status == SolveStatus::LeftDomain {
            continue;
        }
        checked += 1;
        for w in t.residual_norms.windows(2) {
            assert!(w[1] <= w[0] + RESIDUAL_FLOOR, "start {x0:?}: {} -> {}", w[0], w[1]);
        }
    }
    assert!(checked > 150, "only {checked} traces checked");
}

/// Close to a singular line `‖N_F‖` is large and the first damped step can
/// still overshoot: the contraction needs τ below a trace-dependent bound.
#[test]
fn near_singular_start_can_increase_the_residual() {
    let p = ExpSinProblem::new();
    let x0 = [0.75, -1.1666666666666667];
    assert!(expsin_singular_distance(&x0) < 0.01);
    let t = solve(&p, &x0, &SolverConfig::new(Mode::Adaptive { tau: 1e-3 }));
    assert!(t.converged());
    assert!(t.residual_norms[1] > t.residual_norms[0]);
    let smaller = solve(&p, &x0, &SolverConfig::new(Mode::Adaptive { tau: 1e-6 }).with_max_iters(100_000));
    assert!(smaller.residual_norms.windows(2).all(|w| w[1] <= w[0] + RESIDUAL_FLOOR));
}

#[test]
fn cubic_newton_update_matches_complex_division() {
    // N(z) = -(z³ - 2z - 4) / (3z² - 2), evaluated in complex arithmetic.
    for &(x, y) in &[(0.3, 0.7), (-2.0, 1.5), (4.0, -3.0)] {
        let (zr, zi) = (x, y);
        let (z2r, z2i) = (zr * zr - zi * zi, 2.0 * zr * zi);
        let (z3r, z3i) = (z2r * zr - z2i * zi, z2r * zi + z2i * zr);
        let (fr, fi) = (z3r - 2.0 * zr - 4.0, z3i - 2.0 * zi);
        let (dr, di) = (3.0 * z2r - 2.0, 3.0 * z2i);
        let den = dr * dr + di * di;
        let (nr, ni) = (-(fr * dr + fi * di) / den, -(fi * dr - fr * di) / den);
        let f = cubic_residual(&[x, y]);
        let d = solve_dense(&cubic_jacobian(&[x, y]), &[-f[0], -f[1]]).unwrap();
        assert!((d[0] - nr).abs() < 1e-12 && (d[1] - ni).abs() < 1e-12);
    }
    let _ = CubicProblem::roots();
}

proptest! {
    #[test]
    fn cubic_residual_is_conjugation_symmetric(x in -10.0..10.0f64, y in -10.0..10.0f64) {
        let a = cubic_residual(&[x, y]);
        let b = cubic_residual(&[x, -y]);
        prop_assert_eq!(a[0], b[0]);
        prop_assert_eq!(a[1], -b[1]);
    }

    #[test]
    fn cubic_jacobian_has_cauchy_riemann_form(x in -10.0..10.0f64, y in -10.0..10.0f64) {
        let j = cubic_jacobian(&[x, y]);
        prop_assert_eq!(j[(0, 0)], j[(1, 1)]);
        prop_assert_eq!(j[(0, 1)], -j[(1, 0)]);
    }
}
