//! Linear-solve kernels for the Newton update `F'(x) d = -F(x)`.
//!
//! Three storage formats cover the shipped problems: small dense systems
//! (algebraic problems), symmetric tridiagonal systems (1-D finite
//! elements) and compressed-row sparse systems (2-D finite differences).

use thiserror::Error;

/// Pivots with magnitude below this are treated as a breakdown.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Default relative residual target of [`solve_sparse_spd`].
pub const CG_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (pivot {pivot:e} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },
    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

fn check_len(expected: usize, got: usize) -> Result<(), LinalgError> {
    if expected == got {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, got })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn euclidean_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count must equal rows*cols");
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::new(N, N, rows.iter().flatten().copied().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        self.entries.chunks(self.cols).map(|row| dot(row, x)).collect()
    }

    /// Determinant by elimination; intended for small matrices.
    pub fn determinant(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            det *= a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                for c in k..n {
                    a[i * n + c] -= f * a[k * n + c];
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.entries[r * self.cols + c]
    }
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    check_len(a.rows, a.cols)?;
    check_len(a.rows, b.len())?;
    let n = a.rows;
    // 2x2 systems dominate basin sampling; skip the allocation-heavy path.
    if n == 2 {
        return solve_2x2(&a.entries, b);
    }
    let mut m = a.entries.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs()))
            .unwrap();
        let pivot = m[p * n + k];
        if pivot.is_nan() || pivot.abs() < PIVOT_THRESHOLD {
            return Err(LinalgError::SingularMatrix { row: k, pivot });
        }
        if p != k {
            for c in 0..n {
                m.swap(k * n + c, p * n + c);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            if f != 0.0 {
                for c in k..n {
                    m[i * n + c] -= f * m[k * n + c];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| m[k * n + c] * x[c]).sum();
        x[k] = (x[k] - s) / m[k * n + k];
    }
    Ok(x)
}

fn solve_2x2(m: &[f64], b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let (mut a00, mut a01, mut a10, mut a11) = (m[0], m[1], m[2], m[3]);
    let (mut b0, mut b1) = (b[0], b[1]);
    if a10.abs() > a00.abs() {
        std::mem::swap(&mut a00, &mut a10);
        std::mem::swap(&mut a01, &mut a11);
        std::mem::swap(&mut b0, &mut b1);
    }
    if a00.is_nan() || a00.abs() < PIVOT_THRESHOLD {
        return Err(LinalgError::SingularMatrix { row: 0, pivot: a00 });
    }
    let f = a10 / a00;
    let p1 = a11 - f * a01;
    if p1.is_nan() || p1.abs() < PIVOT_THRESHOLD {
        return Err(LinalgError::SingularMatrix { row: 1, pivot: p1 });
    }
    let x1 = (b1 - f * b0) / p1;
    let x0 = (b0 - a01 * x1) / a00;
    Ok(vec![x0, x1])
}

/// Tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Self {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(lower.len(), n - 1);
        assert_eq!(upper.len(), n - 1);
        Self { lower, diag, upper }
    }

    /// Constant-coefficient matrix `tridiag(sub, main, sup)`.
    pub fn constant(n: usize, sub: f64, main: f64, sup: f64) -> Self {
        Self::new(vec![sub; n - 1], vec![main; n], vec![sup; n - 1])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.lower[i];
                m[(i, i + 1)] = self.upper[i];
            }
        }
        m
    }
}

/// Thomas elimination (no pivoting).
pub fn solve_tridiagonal(t: &TridiagonalMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = t.dim();
    check_len(n, b.len())?;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = t.diag[0];
    if pivot.is_nan() || pivot.abs() < PIVOT_THRESHOLD {
        return Err(LinalgError::SingularMatrix { row: 0, pivot });
    }
    if n > 1 {
        c[0] = t.upper[0] / pivot;
    }
    d[0] = b[0] / pivot;
    for i in 1..n {
        pivot = t.diag[i] - t.lower[i - 1] * c[i - 1];
        if pivot.is_nan() || pivot.abs() < PIVOT_THRESHOLD {
            return Err(LinalgError::SingularMatrix { row: i, pivot });
        }
        if i + 1 < n {
            c[i] = t.upper[i] / pivot;
        }
        d[i] = (b[i] - t.lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Square matrix in compressed-row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from CSR arrays; column indices must be strictly increasing per row.
    pub fn from_csr(n: usize, offsets: Vec<usize>, columns: Vec<usize>, values: Vec<f64>) -> Self {
        assert_eq!(offsets.len(), n + 1);
        assert_eq!(columns.len(), values.len());
        assert_eq!(*offsets.last().unwrap(), columns.len());
        for r in 0..n {
            assert!(offsets[r] <= offsets[r + 1], "row offsets must be monotone");
            let row = &columns[offsets[r]..offsets[r + 1]];
            assert!(row.windows(2).all(|w| w[0] < w[1]), "columns must increase within a row");
            assert!(row.iter().all(|&c| c < n));
        }
        Self { n, offsets, columns, values }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut offsets = vec![0; n + 1];
        let mut columns: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                columns.push(c);
                values.push(v);
                offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            offsets[r + 1] += offsets[r];
        }
        Self::from_csr(n, offsets, columns, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[r]..self.offsets[r + 1];
        self.columns[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(col, _)| col == c).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.offsets[r]..self.offsets[r + 1];
            *out = self.columns[span.clone()]
                .iter()
                .zip(&self.values[span])
                .map(|(&c, v)| v * x[c])
                .sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|r| self.row(r).all(|(c, v)| (self.get(c, r) - v).abs() <= tol))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Conjugate gradients for symmetric systems, stopping at relative residual
/// `tol` or after `10 n` iterations.
///
/// Symmetric indefinite systems are accepted as long as no search direction
/// has vanishing curvature; when that happens, or the cap is reached, the
/// result is [`LinalgError::NoConvergence`].
pub fn solve_sparse_spd(a: &SparseMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>, LinalgError> {
    let n = a.dim();
    check_len(n, b.len())?;
    assert!(tol > 0.0);
    let b_norm = euclidean_norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let cap = 10 * n;
    let target = tol * b_norm;
    for _ in 0..cap {
        a.mul_vec_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if curvature == 0.0 || !curvature.is_finite() {
            break;
        }
        let alpha = rr / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            return Ok(x);
        }
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    Err(LinalgError::NoConvergence { iterations: cap, residual: rr.sqrt() / b_norm })
}
