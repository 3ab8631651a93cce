use newtonlab::linalg::{
    euclidean_norm, solve_dense, solve_sparse_spd, solve_tridiagonal, DenseMatrix, LinalgError, SparseMatrix, TridiagonalMatrix,
    CG_TOLERANCE,
};
use proptest::prelude::*;

fn residual_norm(ax: &[f64], b: &[f64]) -> f64 {
    euclidean_norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>())
}

#[test]
fn dense_examples() {
    assert_eq!(solve_dense(&DenseMatrix::identity(2), &[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
    let d = DenseMatrix::from_rows([[2.0, 0.0], [0.0, 4.0]]);
    assert_eq!(solve_dense(&d, &[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    assert!(matches!(solve_dense(&DenseMatrix::zeros(2, 2), &[1.0, 1.0]), Err(LinalgError::SingularMatrix { .. })));
}

#[test]
fn tridiagonal_examples() {
    let x = solve_tridiagonal(&TridiagonalMatrix::constant(3, 0.0, 1.0, 0.0), &[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(x, vec![1.0, 2.0, 3.0]);
    let x = solve_tridiagonal(&TridiagonalMatrix::constant(2, -1.0, 2.0, -1.0), &[1.0, 0.0]).unwrap();
    assert!((x[0] - 2.0 / 3.0).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
    // [[1,1],[1,1]]: the second pivot is exactly zero.
    let t = TridiagonalMatrix::new(vec![1.0], vec![1.0, 1.0], vec![1.0]);
    assert!(matches!(solve_tridiagonal(&t, &[1.0, 2.0]), Err(LinalgError::SingularMatrix { .. })));
}

fn laplacian(m: usize) -> SparseMatrix {
    let idx = |i: usize, j: usize| i * m + j;
    let mut t = Vec::new();
    for i in 0..m {
        for j in 0..m {
            t.push((idx(i, j), idx(i, j), 4.0));
            if i > 0 {
                t.push((idx(i, j), idx(i - 1, j), -1.0));
            }
            if i + 1 < m {
                t.push((idx(i, j), idx(i + 1, j), -1.0));
            }
            if j > 0 {
                t.push((idx(i, j), idx(i, j - 1), -1.0));
            }
            if j + 1 < m {
                t.push((idx(i, j), idx(i, j + 1), -1.0));
            }
        }
    }
    SparseMatrix::from_triplets(m * m, t)
}

#[test]
fn sparse_examples() {
    let b = vec![1.5, -2.0, 0.25];
    let x = solve_sparse_spd(&SparseMatrix::identity(3), &b, CG_TOLERANCE).unwrap();
    assert!(residual_norm(&x, &b) < 1e-14);
    let two = SparseMatrix::from_triplets(4, (0..4).map(|i| (i, i, 2.0)).collect());
    let x = solve_sparse_spd(&two, &[4.0; 4], CG_TOLERANCE).unwrap();
    assert!(x.iter().all(|v| (v - 2.0).abs() < 1e-12));

    let a = laplacian(3);
    let mut e5 = vec![0.0; 9];
    e5[4] = 1.0;
    let cg = solve_sparse_spd(&a, &e5, CG_TOLERANCE).unwrap();
    let dense = solve_dense(&a.to_dense(), &e5).unwrap();
    for (p, q) in cg.iter().zip(&dense) {
        assert!((p - q).abs() < 1e-10);
    }
    // Centre-weighted: the centre value dominates, corners are the smallest.
    assert!(cg[4] > cg[1] && cg[1] > cg[0] && cg[0] > 0.0);
}

fn tridiagonal_strategy() -> impl Strategy<Value = (TridiagonalMatrix, Vec<f64>)> {
    (2usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0..1.0f64, n - 1),
            prop::collection::vec(2.5..5.0f64, n),
            prop::collection::vec(-1.0..1.0f64, n - 1),
            prop::collection::vec(-10.0..10.0f64, n),
        )
            .prop_map(|(l, d, u, b)| (TridiagonalMatrix::new(l, d, u), b))
    })
}

fn spd_strategy() -> impl Strategy<Value = (SparseMatrix, Vec<f64>)> {
    (1usize..=64).prop_flat_map(|n| {
        (prop::collection::vec(-1.0..1.0f64, n * n), prop::collection::vec(-5.0..5.0f64, n)).prop_map(move |(g, b)| {
            // G Gᵀ + n I is symmetric positive definite.
            let mut t = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let mut v: f64 = (0..n).map(|k| g[i * n + k] * g[j * n + k]).sum();
                    if i == j {
                        v += n as f64;
                    }
                    t.push((i, j, v));
                }
            }
            (SparseMatrix::from_triplets(n, t), b)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dense_and_tridiagonal_agree((t, b) in tridiagonal_strategy()) {
        let x = solve_tridiagonal(&t, &b).unwrap();
        let y = solve_dense(&t.to_dense(), &b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() <= 1e-10);
        }
        prop_assert!(residual_norm(&t.mul_vec(&x), &b) <= 1e-10 * euclidean_norm(&b).max(1.0));
    }

    #[test]
    fn dense_residual_bound(entries in prop::collection::vec(-3.0..3.0f64, 16), b in prop::collection::vec(-10.0..10.0f64, 4)) {
        let mut a = DenseMatrix::new(4, 4, entries);
        for i in 0..4 {
            a[(i, i)] += 8.0;
        }
        let x = solve_dense(&a, &b).unwrap();
        prop_assert!(residual_norm(&a.mul_vec(&x), &b) <= 1e-12 * euclidean_norm(&b).max(1.0));
    }

    #[test]
    fn cg_agrees_with_dense((a, b) in spd_strategy()) {
        let x = solve_sparse_spd(&a, &b, CG_TOLERANCE).unwrap();
        let y = solve_dense(&a.to_dense(), &b).unwrap();
        let scale = euclidean_norm(&y).max(1.0);
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() <= 1e-8 * scale);
        }
        prop_assert!(residual_norm(&a.mul_vec(&x), &b) <= CG_TOLERANCE * euclidean_norm(&b) * 1.0001);
    }
}
