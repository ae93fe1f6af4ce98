//! Dense real matrices and the elimination-based operations the rest of the
//! toolkit builds on: linear solves, rank revelation, characteristic
//! polynomials and condition estimation.
//!
//! Everything here is deterministic: scans run left-to-right / top-to-bottom
//! and identical inputs give bit-identical outputs.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use std::fmt;

/// Dense real matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from nested rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::DimensionError("matrix must be non-empty".into()));
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionError(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::DimensionError(format!(
                    "non-finite entry at ({}, {})",
                    i, j
                )));
            }
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Build from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Column vector from a slice.
    pub fn column_vector(v: &[f64]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Rows as nested vectors (serialization helper).
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "inner dimensions must agree");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max row sum norm (the operator infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Euclidean norm of the largest column.
    pub fn max_col_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| self.col(j).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Contiguous submatrix.
    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols);
        Matrix::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, m: &Matrix) {
        assert!(row0 + m.rows <= self.rows && col0 + m.cols <= self.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(row0 + i, col0 + j)] = m[(i, j)];
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                write!(f, " {:>12.6}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:>12.6}", self[(i, j)])?;
            }
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Scale-aware rank tolerance: `max(rows, cols) * eps * largest column norm`.
pub fn default_rank_tol(m: &Matrix) -> f64 {
    let scale = m.max_col_norm();
    m.rows.max(m.cols) as f64 * f64::EPSILON * if scale > 0.0 { scale } else { 1.0 }
}

/// Solve `A X = B` by LU factorization with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] when a pivot falls below the rank
/// tolerance derived from `A`.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    solve_linear_with_tol(a, b, default_rank_tol(a))
}

/// [`solve_linear`] with an explicit pivot tolerance.
pub fn solve_linear_with_tol(a: &Matrix, b: &Matrix, tol: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve requires a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if b.rows != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, expected {}",
            b.rows, a.rows
        )));
    }
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        // partial pivoting: first maximal entry in the column wins
        let mut pivot_row = k;
        let mut pivot_mag = lu[(k, k)].abs();
        for i in k + 1..n {
            let mag = lu[(i, k)].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag < tol {
            return Err(Error::SingularMatrix {
                step: k,
                pivot: pivot_mag,
                tol,
            });
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            perm.swap(k, pivot_row);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in k + 1..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= factor * v;
            }
        }
    }

    // forward/back substitution per right-hand-side column
    let mut x = Matrix::zeros(n, b.cols);
    for c in 0..b.cols {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[(perm[i], c)];
            for j in 0..i {
                s -= lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= lu[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Incremental column-independence tester backed by Gaussian elimination
/// with partial pivoting.
///
/// Both [`rank_revealing`] and the chain builder feed candidate vectors
/// through this, so "independent" means the same thing everywhere.
pub struct IncrementalRank {
    dim: usize,
    tol: f64,
    pivots: Vec<(usize, Vec<f64>)>,
    pivot_used: Vec<bool>,
}

impl IncrementalRank {
    pub fn new(dim: usize, tol: f64) -> Self {
        IncrementalRank {
            dim,
            tol,
            pivots: Vec::new(),
            pivot_used: vec![false; dim],
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Try to add `v`; returns true when it is independent of everything
    /// accepted so far (and keeps it), false when it is dependent.
    pub fn try_add(&mut self, v: &[f64]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        for (p, u) in &self.pivots {
            let factor = w[*p] / u[*p];
            if factor != 0.0 {
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= factor * ui;
                }
            }
        }
        // pick the largest remaining entry as pivot (first one on ties)
        let mut pivot = None;
        let mut best = self.tol;
        for (i, &wi) in w.iter().enumerate() {
            if !self.pivot_used[i] && wi.abs() > best {
                best = wi.abs();
                pivot = Some(i);
            }
        }
        match pivot {
            Some(p) => {
                self.pivot_used[p] = true;
                self.pivots.push((p, w));
                true
            }
            None => false,
        }
    }
}

/// Numerical rank and the first maximal independent column set, scanning
/// columns left to right.
pub fn rank_revealing(m: &Matrix, tol: f64) -> (usize, Vec<usize>) {
    let mut inc = IncrementalRank::new(m.rows, tol);
    let mut indices = Vec::new();
    for j in 0..m.cols {
        if inc.try_add(&m.col(j)) {
            indices.push(j);
        }
    }
    (inc.rank(), indices)
}

/// Monic characteristic polynomial `det(sI - A)` by the Faddeev-LeVerrier
/// recurrence. Accuracy degrades past order ~50; callers at that scale
/// should expect warnings downstream.
pub fn char_poly(a: &Matrix) -> Polynomial {
    assert!(a.is_square(), "characteristic polynomial needs a square matrix");
    let n = a.rows;
    if n == 0 {
        return Polynomial::new(vec![1.0]);
    }
    // coeffs[k] multiplies s^k; fill from s^{n-1} downward
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = a.clone();
    for k in 1..=n {
        let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
        let c = -trace / k as f64;
        coeffs[n - k] = c;
        if k < n {
            for i in 0..n {
                m[(i, i)] += c;
            }
            m = a.mul(&m);
        }
    }
    Polynomial::new(coeffs)
}

/// Condition estimate `‖A‖·‖A⁻¹‖` in the max-row-sum norm; `+inf` for a
/// singular matrix.
pub fn condition_estimate(a: &Matrix) -> f64 {
    assert!(a.is_square(), "condition estimate needs a square matrix");
    match solve_linear(a, &Matrix::identity(a.rows)) {
        Ok(inv) => a.norm_inf() * inv.norm_inf(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = mat(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        let x = solve_linear(&Matrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_permutation_swaps_rows() {
        let a = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = mat(&[&[1.0], &[2.0]]);
        let x = solve_linear(&a, &b).unwrap();
        assert_eq!(x.to_rows(), vec![vec![2.0], vec![1.0]]);
    }

    #[test]
    fn solve_recovers_known_solution() {
        // forward-multiply oracle: build B = A * X0 first, then solve for X0
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 5;
        let a = Matrix::from_fn(n, n, |i, j| {
            let v: f64 = rng.random_range(-1.0..1.0);
            if i == j {
                v + 4.0
            } else {
                v
            }
        });
        let x0 = Matrix::from_fn(n, 2, |_, _| rng.random_range(-1.0..1.0));
        let b = a.mul(&x0);
        let x = solve_linear(&a, &b).unwrap();
        let err = x.sub(&x0).norm_max();
        assert!(err < 1e-8, "recovery error {err}");
    }

    #[test]
    fn solve_residual_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(1..=6);
            let a = Matrix::from_fn(n, n, |i, j| {
                let v: f64 = rng.random_range(-2.0..2.0);
                if i == j {
                    v + 5.0
                } else {
                    v
                }
            });
            let b = Matrix::from_fn(n, 1, |_, _| rng.random_range(-2.0..2.0));
            let x = solve_linear(&a, &b).unwrap();
            let resid = a.mul(&x).sub(&b).norm_max();
            assert!(resid <= 1e-10 * (1.0 + a.norm_max() * x.norm_max()));
        }
    }

    #[test]
    fn solve_singular_errors() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let b = mat(&[&[1.0], &[1.0]]);
        assert!(matches!(
            solve_linear(&a, &b),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn rank_identity() {
        let (r, idx) = rank_revealing(&Matrix::identity(3), 1e-12);
        assert_eq!((r, idx), (3, vec![0, 1, 2]));
    }

    #[test]
    fn rank_proportional_columns() {
        let m = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let (r, idx) = rank_revealing(&m, default_rank_tol(&m));
        assert_eq!((r, idx), (1, vec![0]));
    }

    #[test]
    fn rank_krylov_pair() {
        // M = [b, Ab] for A = [[0,1],[0,0]], b = [0,1]^T; det = -1 so rank 2
        let m = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (r, idx) = rank_revealing(&m, default_rank_tol(&m));
        assert_eq!((r, idx), (2, vec![0, 1]));
    }

    #[test]
    fn rank_zero_matrix() {
        let m = Matrix::zeros(3, 2);
        let (r, idx) = rank_revealing(&m, 1e-12);
        assert_eq!(r, 0);
        assert!(idx.is_empty());
    }

    /// Exact integer rank via largest non-vanishing Gram determinant,
    /// enumerating all column subsets.
    fn gram_rank_oracle(m: &Matrix) -> usize {
        fn det_i128(g: &mut Vec<Vec<i128>>) -> i128 {
            // fraction-free Gaussian elimination (Bareiss)
            let n = g.len();
            let mut sign = 1i128;
            let mut prev = 1i128;
            for k in 0..n {
                if g[k][k] == 0 {
                    let swap = (k + 1..n).find(|&i| g[i][k] != 0);
                    match swap {
                        Some(i) => {
                            g.swap(k, i);
                            sign = -sign;
                        }
                        None => return 0,
                    }
                }
                for i in k + 1..n {
                    for j in k + 1..n {
                        g[i][j] = (g[i][j] * g[k][k] - g[i][k] * g[k][j]) / prev;
                    }
                    g[i][k] = 0;
                }
                prev = g[k][k];
            }
            sign * g[n - 1][n - 1]
        }
        let cols: Vec<Vec<i128>> = (0..m.cols())
            .map(|j| m.col(j).iter().map(|&v| v.round() as i128).collect())
            .collect();
        let mut best = 0;
        for mask in 1u32..(1 << m.cols()) {
            let chosen: Vec<usize> = (0..m.cols()).filter(|j| mask & (1 << j) != 0).collect();
            let size = chosen.len();
            if size <= best || size > m.rows() {
                continue;
            }
            let mut gram = vec![vec![0i128; size]; size];
            for a in 0..size {
                for b in 0..size {
                    gram[a][b] = cols[chosen[a]]
                        .iter()
                        .zip(&cols[chosen[b]])
                        .map(|(x, y)| x * y)
                        .sum();
                }
            }
            if det_i128(&mut gram) != 0 {
                best = size;
            }
        }
        best
    }

    #[test]
    fn rank_matches_gram_determinant_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.random_range(1..=5);
            let c = rng.random_range(1..=5);
            let m = Matrix::from_fn(n, c, |_, _| rng.random_range(-2..=2) as f64);
            let (r, _) = rank_revealing(&m, default_rank_tol(&m));
            assert_eq!(r, gram_rank_oracle(&m), "mismatch for {m:?}");
        }
    }

    #[test]
    fn char_poly_double_integrator() {
        let a = mat(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(char_poly(&a).coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn char_poly_scalar() {
        let a = mat(&[&[-1.0]]);
        assert_eq!(char_poly(&a).coeffs(), &[1.0, 1.0]);
    }

    #[test]
    fn char_poly_matches_cofactor_expansion() {
        // direct 3x3 oracle: s^3 - tr s^2 + (sum of principal 2-minors) s - det
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = Matrix::from_fn(3, 3, |_, _| rng.random_range(-4..=4) as f64);
            let tr = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
            let minor = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
            let m2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
            let det = a[(0, 0)] * minor(1, 2) - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
            let p = char_poly(&a);
            let expected = [-det, m2, -tr, 1.0];
            for (got, want) in p.coeffs().iter().zip(expected) {
                assert!(
                    (got - want).abs() <= 1e-9 * (1.0 + want.abs()),
                    "coefficient {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn char_poly_similarity_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 30 {
            let n = rng.random_range(2..=5);
            let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-3..=3) as f64);
            let t = Matrix::from_fn(n, n, |_, _| rng.random_range(-3..=3) as f64);
            if condition_estimate(&t) >= 1e3 {
                continue;
            }
            let t_inv = solve_linear(&t, &Matrix::identity(n)).unwrap();
            let conj = t.mul(&a).mul(&t_inv);
            let p = char_poly(&a);
            let q = char_poly(&conj);
            for (x, y) in p.coeffs().iter().zip(q.coeffs()) {
                assert!(
                    (x - y).abs() <= 1e-8 * (1.0 + x.abs().max(y.abs())),
                    "{x} vs {y}"
                );
            }
            done += 1;
        }
    }

    #[test]
    fn condition_identity_is_one() {
        assert_eq!(condition_estimate(&Matrix::identity(3)), 1.0);
    }

    #[test]
    fn condition_diagonal_scaling() {
        let a = mat(&[&[1.0, 0.0], &[0.0, 1e6]]);
        let c = condition_estimate(&a);
        assert!((c - 1e6).abs() < 1.0, "condition {c}");
    }

    #[test]
    fn condition_singular_is_infinite() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(condition_estimate(&a).is_infinite());
    }

    #[test]
    fn condition_hilbert_matches_explicit_inverse() {
        let h = Matrix::from_fn(4, 4, |i, j| 1.0 / (i + j + 1) as f64);
        // the 4x4 Hilbert inverse is an exact integer matrix
        let h_inv = mat(&[
            &[16.0, -120.0, 240.0, -140.0],
            &[-120.0, 1200.0, -2700.0, 1680.0],
            &[240.0, -2700.0, 6480.0, -4200.0],
            &[-140.0, 1680.0, -4200.0, 2800.0],
        ]);
        let oracle = h.norm_inf() * h_inv.norm_inf();
        let est = condition_estimate(&h);
        assert!(est / oracle < 10.0 && oracle / est < 10.0, "{est} vs {oracle}");
    }
}
