//! Dense real linear algebra: vectors, small square matrices, a simplex LP
//! solver and a Jacobi eigensolver for symmetric matrices.

mod eigen;
mod lp;

pub use eigen::{eigen_sym, eigen_sym_with, SpectralDecomposition};
pub use lp::{solve_lp, solve_lp_with, LpOutcome, LpProblem, LpStatus};

use std::ops::{Add, Deref, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense vector of finite reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("vector must have positive dimension"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!("vector entry {i} is not finite")));
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = 1.0;
        v
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Vector(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector(self.0.iter().map(|x| t * x).collect())
    }

    /// `self + t * other`
    pub fn axpy(&self, t: f64, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + t * b).collect())
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&x| f(x)).collect())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::input("matrix must be non-empty"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::input(format!("row {i} has length {} but matrix side is {n}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { n, data })
    }

    /// Interprets a flattened row-major `d*d` vector as a matrix.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        let n = (flat.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != flat.len() {
            return Err(Error::input(format!("length {} is not a perfect square", flat.len())));
        }
        Ok(Matrix { n, data: flat.to_vec() })
    }

    pub fn to_flat(&self) -> Vector {
        Vector(self.data.clone())
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        (0..self.n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= rel_tol * scale))
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, t: f64, other: &Matrix) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + t * b).collect() }
    }

    pub fn scale(&self, t: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|a| t * a).collect() }
    }

    /// `v vᵀ`
    pub fn outer(v: &[f64]) -> Matrix {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j];
            }
        }
        m
    }

    /// Averages the matrix with its transpose.
    pub fn symmetrized(&self) -> Matrix {
        self.add_scaled(1.0, &self.transpose()).scale(0.5)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Numerical rank of a set of vectors (as rows) by Gaussian elimination with
/// full pivoting. Entries below `tol * max|entry|` count as zero.
pub fn rank(vectors: &[Vector], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].dim();
    let mut a: Vec<Vec<f64>> = vectors.iter().map(|v| v.as_slice().to_vec()).collect();
    let scale = vectors.iter().map(|v| v.max_abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let thresh = tol * scale;
    let mut r = 0;
    let mut used_cols = vec![false; cols];
    while r < a.len() {
        let mut best = (0.0, 0, 0);
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, &x) in row.iter().enumerate() {
                if !used_cols[j] && x.abs() > best.0 {
                    best = (x.abs(), i, j);
                }
            }
        }
        if best.0 <= thresh {
            break;
        }
        let (_, pi, pj) = best;
        a.swap(r, pi);
        used_cols[pj] = true;
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            let f = row[pj] / pivot_row[pj];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Least-squares coefficients `alpha` minimising `‖Σ alpha_i b_i − target‖₂`
/// via modified Gram–Schmidt QR. Returns the coefficients and the residual
/// Euclidean norm. Fails if the basis is numerically dependent.
pub fn least_squares(basis: &[Vector], target: &Vector) -> Result<(Vec<f64>, f64)> {
    let m = basis.len();
    if m == 0 {
        return Err(Error::input("empty basis"));
    }
    let n = target.dim();
    if basis.iter().any(|b| b.dim() != n) {
        return Err(Error::input("basis vectors and target differ in dimension"));
    }
    let mut q: Vec<Vec<f64>> = basis.iter().map(|b| b.as_slice().to_vec()).collect();
    let mut r = vec![vec![0.0; m]; m];
    for j in 0..m {
        let orig = basis[j].norm2();
        for i in 0..j {
            let proj = dot(&q[i], &q[j]);
            r[i][j] = proj;
            let qi = q[i].clone();
            for (x, y) in q[j].iter_mut().zip(&qi) {
                *x -= proj * y;
            }
        }
        // re-orthogonalise once for stability
        for i in 0..j {
            let proj = dot(&q[i], &q[j]);
            r[i][j] += proj;
            let qi = q[i].clone();
            for (x, y) in q[j].iter_mut().zip(&qi) {
                *x -= proj * y;
            }
        }
        let nrm = dot(&q[j], &q[j]).sqrt();
        if nrm <= 1e-12 * orig.max(f64::MIN_POSITIVE) || orig == 0.0 {
            return Err(Error::input(format!("basis vector {j} is linearly dependent on its predecessors")));
        }
        r[j][j] = nrm;
        q[j].iter_mut().for_each(|x| *x /= nrm);
    }
    let qt_b: Vec<f64> = q.iter().map(|qi| dot(qi, target)).collect();
    let mut alpha = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|j| r[i][j] * alpha[j]).sum();
        alpha[i] = (qt_b[i] - s) / r[i][i];
    }
    let mut resid = target.clone();
    for (a, b) in alpha.iter().zip(basis) {
        resid = resid.axpy(-a, b);
    }
    Ok((alpha, resid.norm2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(rank(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0])], 1e-12), 1);
        assert_eq!(rank(&[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[1.0, 1.0, 0.0])], 1e-12), 2);
        assert_eq!(rank(&[v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[-1.0, 1.0])], 1e-12), 2);
        assert_eq!(rank(&[v(&[0.0, 0.0])], 1e-12), 0);
    }

    #[test]
    fn least_squares_recovers_coefficients() {
        let basis = [v(&[1.0, 0.0, 1.0]), v(&[0.0, 2.0, 0.0])];
        let target = v(&[3.0, -4.0, 3.0]);
        let (alpha, res) = least_squares(&basis, &target).unwrap();
        assert!((alpha[0] - 3.0).abs() < 1e-14);
        assert!((alpha[1] + 2.0).abs() < 1e-14);
        assert!(res < 1e-14);
    }

    #[test]
    fn least_squares_rejects_dependent_basis() {
        let basis = [v(&[1.0, 1.0]), v(&[2.0, 2.0])];
        assert!(least_squares(&basis, &v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn matrix_flat_roundtrip() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(Matrix::from_flat(&m.to_flat()).unwrap(), m);
        assert!(Matrix::from_flat(&[1.0, 2.0, 3.0]).is_err());
        assert!(!m.is_symmetric(1e-12));
        assert!(m.symmetrized().is_symmetric(1e-12));
    }
}
