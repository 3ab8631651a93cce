use newtonlab::linalg::DenseMatrix;
use newtonlab::problem::{jacobian_mismatch, AffineProblem};
use newtonlab::problems::algebraic::{CubicProblem, ExpSinProblem};
use newtonlab::problems::bvp1d::Bvp1dProblem;
use newtonlab::problems::pde2d::CubicPdeProblem;
use newtonlab::solver::NewtonError;
use newtonlab::{adaptive_step, error_indicator, flow, newton_step, nrt, solve, FlowConfig, FlowStatus, Mode, NonlinearProblem, SolveStatus, SolverConfig};
use proptest::prelude::*;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

const CUBIC_ROOTS: [[f64; 2]; 3] = [[2.0, 0.0], [-1.0, 1.0], [-1.0, -1.0]];

fn nearest_root(x: &[f64]) -> usize {
    (0..3).min_by(|&a, &b| dist(x, &CUBIC_ROOTS[a]).total_cmp(&dist(x, &CUBIC_ROOTS[b]))).unwrap()
}

#[test]
fn nrt_examples() {
    assert_eq!(nrt(&CubicProblem, &[2.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    assert_eq!(nrt(&CubicProblem, &[0.0, 0.0]).unwrap(), vec![-2.0, 0.0]);
    let c = (2.0f64 / 3.0).sqrt();
    assert!(matches!(nrt(&CubicProblem, &[c, 0.0]), Err(NewtonError::SingularJacobian(_))));
    assert!(matches!(nrt(&ExpSinProblem::new(), &[2.0, 0.0]), Err(NewtonError::OutOfDomain)));
}

#[test]
fn adaptive_step_examples() {
    assert_eq!(adaptive_step(0.1, 0.2), 1.0);
    assert!((adaptive_step(0.1, 0.8) - 0.5).abs() < 1e-15);
    assert_eq!(adaptive_step(0.05, 0.0), 1.0);
}

#[test]
fn error_indicator_examples() {
    assert_eq!(error_indicator(3.0, 0.0), 0.0);
    assert!((error_indicator(2.0, 1.0) - 2.0 / std::f64::consts::E).abs() < 1e-15);
    let e = error_indicator(2.0, 0.1);
    assert!((e - 0.009674).abs() < 1e-6);
    assert!((e - 0.01).abs() / 0.01 < 0.05);
}

#[test]
fn newton_step_examples() {
    for r in CUBIC_ROOTS {
        assert_eq!(newton_step(&CubicProblem, &r, 0.37).unwrap(), r.to_vec());
    }
    assert_eq!(newton_step(&CubicProblem, &[0.0, 0.0], 1.0).unwrap(), vec![-2.0, 0.0]);
}

#[test]
fn solve_examples() {
    let cfg = |m| SolverConfig::new(m);
    let t = solve(&CubicProblem, &[2.0, 0.0], &cfg(Mode::Adaptive { tau: 0.1 }));
    assert!(t.converged() && t.iterations() <= 1);
    assert_eq!(t.final_state(), &[2.0, 0.0]);

    let x0 = [0.08, 0.55];
    let classical = solve(&CubicProblem, &x0, &cfg(Mode::Classical));
    let adaptive = solve(&CubicProblem, &x0, &cfg(Mode::Adaptive { tau: 0.05 }));
    let reference = flow(&CubicProblem, &x0, &FlowConfig::default());
    assert!(classical.converged() && adaptive.converged() && reference.converged());
    let target = nearest_root(reference.final_state());
    assert_eq!(nearest_root(adaptive.final_state()), target);
    assert_ne!(nearest_root(classical.final_state()), target);

    let c = (2.0f64 / 3.0).sqrt();
    assert_eq!(solve(&CubicProblem, &[c, 0.0], &cfg(Mode::Classical)).status, SolveStatus::Singular);
}

#[test]
fn flow_examples() {
    let traj = flow(&CubicProblem, &[-1.0, 1.0], &FlowConfig::default());
    assert!(traj.states.iter().all(|s| s == &[-1.0, 1.0]));
    assert!(traj.residual_norms.iter().all(|r| *r <= 1e-8));

    let a = [0.5, -1.5];
    let affine = AffineProblem { matrix: DenseMatrix::identity(2), rhs: a.to_vec() };
    let x0 = [3.0, 2.0];
    let cfg = FlowConfig { dt: 0.1, t_max: 2.0, residual_stop: 1e-12 };
    let traj = flow(&affine, &x0, &cfg);
    let r0 = dist(&x0, &a);
    for (k, r) in traj.residual_norms.iter().enumerate() {
        let expected = 0.9f64.powi(k as i32) * r0;
        assert!((r - expected).abs() <= 1e-12 * r0, "step {k}: {r} vs {expected}");
    }

    let x0 = [0.08, 0.55];
    let fine = FlowConfig { dt: 1e-3, ..FlowConfig::default() };
    let traj = flow(&CubicProblem, &x0, &fine);
    assert_eq!(traj.status, FlowStatus::Converged);
    let end = traj.final_state();
    assert!(CUBIC_ROOTS.iter().any(|r| dist(end, r) <= 1e-6));
    let f0 = traj.residual_norms[0];
    for (t, r) in traj.times.iter().zip(&traj.residual_norms).filter(|(t, _)| **t <= 5.0) {
        let ratio = r / f0 / (-t).exp();
        assert!((0.98..=1.02).contains(&ratio), "t={t}: ratio {ratio}");
    }
}

#[test]
fn roots_are_fixed_points_of_every_mode() {
    for r in CUBIC_ROOTS {
        for mode in [Mode::Classical, Mode::Fixed { t: 0.3 }, Mode::Adaptive { tau: 1e-3 }] {
            let t = solve(&CubicProblem, &r, &SolverConfig::new(mode));
            assert!(t.converged() && t.iterations() == 0, "{mode} from {r:?}");
        }
        assert!(nrt(&CubicProblem, &r).unwrap().iter().all(|v| *v == 0.0));
    }
}

#[test]
fn jacobians_match_finite_differences_at_random_points() {
    use rand_like::Lcg;
    let mut rng = Lcg(0x5eed);
    let bvp_c = Bvp1dProblem::cubic(12);
    let bvp_b = Bvp1dProblem::bratu(12);
    let pde = CubicPdeProblem::new(5);
    for _ in 0..100 {
        let p2 = [rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)];
        assert!(jacobian_mismatch(&CubicProblem, &p2) < 1e-6);
        let q2 = [rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)];
        assert!(jacobian_mismatch(&ExpSinProblem::new(), &q2) < 1e-6);
        let u: Vec<f64> = (0..bvp_c.dim()).map(|_| rng.uniform(-2.0, 2.0)).collect();
        assert!(jacobian_mismatch(&bvp_c, &u) < 1e-6);
        assert!(jacobian_mismatch(&bvp_b, &u) < 1e-6);
        let v: Vec<f64> = (0..pde.dim()).map(|_| rng.uniform(-2.0, 2.0)).collect();
        assert!(jacobian_mismatch(&pde, &v) < 1e-6);
    }
}

/// Small deterministic generator so the sample points are reproducible
/// without pulling in an RNG crate.
mod rand_like {
    pub struct Lcg(pub u64);
    impl Lcg {
        pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            a + (b - a) * ((self.0 >> 11) as f64 / (1u64 << 53) as f64)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn adaptive_step_formula(tau in 1e-6..10.0f64, n in 0.0..1e3f64) {
        let t = adaptive_step(tau, n);
        let expected = if n == 0.0 { 1.0 } else { (2.0 * tau / n).sqrt().min(1.0) };
        prop_assert!((t - expected).abs() <= 1e-12);
        prop_assert!(t > 0.0 && t <= 1.0);
        prop_assert_eq!(t == 1.0, n <= 2.0 * tau);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn affine_maps_contract_by_one_minus_t(
        entries in prop::collection::vec(-1.0..1.0f64, 9),
        b in prop::collection::vec(-5.0..5.0f64, 3),
        x in prop::collection::vec(-5.0..5.0f64, 3),
        t in 0.01..1.0f64,
    ) {
        let mut a = DenseMatrix::new(3, 3, entries);
        for i in 0..3 {
            a[(i, i)] += 4.0;
        }
        let p = AffineProblem { matrix: a, rhs: b };
        let f = p.residual(&x);
        let next = newton_step(&p, &x, t).unwrap();
        let g = p.residual(&next);
        for (gi, fi) in g.iter().zip(&f) {
            prop_assert!((gi - (1.0 - t) * fi).abs() <= 1e-12 * (1.0 + fi.abs()));
        }
        let exact = p.residual(&newton_step(&p, &x, 1.0).unwrap());
        prop_assert!(exact.iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn cubic_traces_commute_with_conjugation(x in -5.0..5.0f64, y in -5.0..5.0f64, tau in 0.01..0.5f64) {
        for mode in [Mode::Classical, Mode::Adaptive { tau }] {
            let a = solve(&CubicProblem, &[x, y], &SolverConfig::new(mode));
            let b = solve(&CubicProblem, &[x, -y], &SolverConfig::new(mode));
            prop_assert_eq!(a.status, b.status);
            prop_assert_eq!(a.iterates.len(), b.iterates.len());
            for (p, q) in a.iterates.iter().zip(&b.iterates) {
                prop_assert_eq!(p[0], q[0]);
                prop_assert_eq!(p[1], -q[1]);
            }
        }
    }

    #[test]
    fn first_adaptive_update_follows_the_newton_field(x in -5.0..5.0f64, y in -5.0..5.0f64, tau in 1e-4..0.1f64) {
        prop_assume!(nrt(&CubicProblem, &[x, y]).is_ok());
        let n = nrt(&CubicProblem, &[x, y]).unwrap();
        let t = solve(&CubicProblem, &[x, y], &SolverConfig::new(Mode::Adaptive { tau }).with_max_iters(1));
        prop_assume!(t.iterates.len() > 1);
        let t0 = t.steps[0];
        for (k, nk) in n.iter().enumerate() {
            let d = (t.iterates[1][k] - t.iterates[0][k]) / t0;
            prop_assert!((d - nk).abs() <= 1e-9 * (1.0 + nk.abs()));
        }
    }

    #[test]
    fn converged_adaptive_traces_end_with_full_steps_and_quadratic_tail(x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let trace = solve(&CubicProblem, &[x, y], &SolverConfig::new(Mode::Adaptive { tau: 0.1 }));
        prop_assume!(trace.converged() && trace.steps.len() >= 4);
        let root = CUBIC_ROOTS[nearest_root(trace.final_state())];
        prop_assert!(dist(trace.final_state(), &root) < 1e-8);
        // Near a simple root ‖N‖ ≈ error < 2τ, so the rule picks t = 1.
        let tail = &trace.steps[trace.steps.len() - 2..];
        prop_assert!(tail.iter().all(|t| *t == 1.0), "final steps {:?}", tail);
        let e: Vec<f64> = trace.iterates.iter().map(|p| dist(p, &root)).collect();
        let k = e.len() - 1;
        let window: Vec<f64> = e[..k].iter().rev().take(3).rev().copied().collect();
        if window.len() == 3 && window[2] > 1e-14 {
            let c = window[2] / (window[1] * window[1]);
            prop_assert!(c.is_finite() && c < 10.0, "e = {:?}", window);
        }
    }
}
