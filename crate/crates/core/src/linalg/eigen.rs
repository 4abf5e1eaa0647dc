//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use super::{Matrix, Vector};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal; `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vector>,
}

impl SpectralDecomposition {
    /// `Σ f(λ_i) v_i v_iᵀ`
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.eigenvalues.len();
        let mut out = Matrix::zeros(n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lam);
            if w != 0.0 {
                out = out.add_scaled(w, &Matrix::outer(v));
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply(|l| l)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn abs_sum(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }
}

pub fn eigen_sym(m: &Matrix) -> Result<SpectralDecomposition> {
    eigen_sym_with(m, 1e-12, 1e-12)
}

/// Jacobi rotations until the off-diagonal Frobenius mass drops to
/// `off_tol * ‖M‖_F`. `sym_tol` is the relative asymmetry accepted on input.
pub fn eigen_sym_with(m: &Matrix, sym_tol: f64, off_tol: f64) -> Result<SpectralDecomposition> {
    if !m.is_symmetric(sym_tol) {
        return Err(Error::input("matrix is not symmetric"));
    }
    let n = m.side();
    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    let target = off_tol * a.frobenius();
    const MAX_SWEEPS: usize = 100;

    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { iterations: sweeps, gap: off(&a) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = order.iter().map(|&i| Vector::from((0..n).map(|k| v[(k, i)]).collect::<Vec<_>>())).collect();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        let d = eigen_sym(&Matrix::identity(3)).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let d = eigen_sym(&Matrix::diag(&[-2.0, 5.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![5.0, -2.0]);
    }

    #[test]
    fn two_by_two() {
        // roots of λ² − 4λ + 3
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let d = eigen_sym(&m).unwrap();
        assert!((d.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-12);
        let v = &d.eigenvectors[0];
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-12 && (v[0] - v[1]).abs() < 1e-12);
        assert!(d.reconstruct().add_scaled(-1.0, &m).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(eigen_sym(&m), Err(Error::Input(_))));
    }
}
