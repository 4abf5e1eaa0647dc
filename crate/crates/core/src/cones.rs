//! Positive cones: the nonnegative orthant, finitely generated (ray) cones and
//! the cone of positive semidefinite matrices.
//!
//! Symmetric matrices are stored flattened row-major with all `d*d` entries;
//! the pairing with a functional is then the plain dot product, which equals
//! `trace(F X)` for symmetric `F` and `X`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigen_sym, rank, solve_lp, LpOutcome, LpProblem, Matrix, Vector};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConeKind {
    NonnegOrthant,
    Rays(Vec<Vector>),
    Psd { side: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub ambient_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeReport {
    pub proper: bool,
    pub generating: bool,
}

impl ConeSpec {
    pub fn orthant(dim: usize) -> Self {
        ConeSpec { kind: ConeKind::NonnegOrthant, ambient_dim: dim }
    }

    pub fn rays(generators: Vec<Vector>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::input("ray cone needs at least one generator"));
        };
        let dim = first.dim();
        for (i, g) in generators.iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::input(format!("generator {i} has dimension {} but generator 0 has {dim}", g.dim())));
            }
            if g.is_zero(0.0) {
                return Err(Error::input(format!("generator {i} is zero")));
            }
        }
        Ok(ConeSpec { kind: ConeKind::Rays(generators), ambient_dim: dim })
    }

    pub fn psd(side: usize) -> Self {
        ConeSpec { kind: ConeKind::Psd { side }, ambient_dim: side * side }
    }

    pub fn is_psd(&self) -> bool {
        matches!(self.kind, ConeKind::Psd { .. })
    }

    pub fn psd_side(&self) -> Option<usize> {
        match self.kind {
            ConeKind::Psd { side } => Some(side),
            _ => None,
        }
    }

    /// Extreme rays for polyhedral cones; `None` for the PSD cone.
    pub fn generators(&self) -> Option<Vec<Vector>> {
        match &self.kind {
            ConeKind::NonnegOrthant => Some((0..self.ambient_dim).map(|i| Vector::unit(self.ambient_dim, i)).collect()),
            ConeKind::Rays(g) => Some(g.clone()),
            ConeKind::Psd { .. } => None,
        }
    }

    pub(crate) fn check_dim(&self, x: &Vector, what: &str) -> Result<()> {
        if x.dim() != self.ambient_dim {
            return Err(Error::input(format!("{what} has dimension {} but the cone lives in dimension {}", x.dim(), self.ambient_dim)));
        }
        Ok(())
    }
}

/// Reads a flattened vector as a symmetric matrix.
pub fn as_symmetric(x: &Vector) -> Result<Matrix> {
    let m = Matrix::from_flat(x)?;
    if !m.is_symmetric(1e-12) {
        return Err(Error::input("flattened matrix is not symmetric"));
    }
    Ok(m.symmetrized())
}

pub fn pairing(f: &Vector, x: &Vector) -> f64 {
    f.dot(x)
}

/// Nonnegative coefficients `a` with `x = Σ a_i g_i` for a ray cone, found by
/// minimising the ℓ₁ residual. Returns the coefficients and that residual.
pub fn ray_coefficients(generators: &[Vector], x: &Vector) -> Result<(Vec<f64>, f64)> {
    let k = generators.len();
    let n = x.dim();
    // variables: a (k), r⁺ (n), r⁻ (n)
    let nv = k + 2 * n;
    let mut obj = vec![0.0; nv];
    obj[k..].iter_mut().for_each(|c| *c = 1.0);
    let mut lp = LpProblem::minimize(Vector::from(obj)).nonneg();
    for i in 0..n {
        let mut row = vec![0.0; nv];
        for (j, g) in generators.iter().enumerate() {
            row[j] = g[i];
        }
        row[k + i] = 1.0;
        row[k + n + i] = -1.0;
        lp = lp.eq(Vector::from(row), x[i]);
    }
    let (opt, arg) = solve_lp(&lp)?.into_optimal("ray coefficients")?;
    Ok((arg.as_slice()[..k].to_vec(), -opt))
}

pub fn cone_contains(cone: &ConeSpec, x: &Vector, tol: f64) -> Result<bool> {
    cone.check_dim(x, "vector")?;
    if x.is_zero(0.0) {
        return Ok(true);
    }
    match &cone.kind {
        ConeKind::NonnegOrthant => Ok(x.iter().all(|&c| c >= -tol)),
        ConeKind::Rays(g) => {
            let (_, resid) = ray_coefficients(g, x)?;
            Ok(resid <= tol * x.max_abs().max(1.0))
        }
        ConeKind::Psd { .. } => Ok(eigen_sym(&as_symmetric(x)?)?.min_eigenvalue() >= -tol),
    }
}

/// `a ≤ b` in the cone order.
pub fn order_le(cone: &ConeSpec, a: &Vector, b: &Vector, tol: f64) -> Result<bool> {
    cone_contains(cone, &(b - a), tol)
}

pub fn dual_cone_contains(cone: &ConeSpec, f: &Vector, tol: f64) -> Result<bool> {
    cone.check_dim(f, "functional")?;
    match &cone.kind {
        ConeKind::NonnegOrthant => Ok(f.iter().all(|&c| c >= -tol)),
        ConeKind::Rays(g) => Ok(g.iter().all(|gi| pairing(f, gi) >= -tol)),
        ConeKind::Psd { .. } => Ok(eigen_sym(&as_symmetric(f)?)?.min_eigenvalue() >= -tol),
    }
}

pub fn cone_proper_generating(cone: &ConeSpec) -> Result<ConeReport> {
    match &cone.kind {
        ConeKind::NonnegOrthant | ConeKind::Psd { .. } => Ok(ConeReport { proper: cone.ambient_dim > 0, generating: cone.ambient_dim > 0 }),
        ConeKind::Rays(gens) => {
            let unit: Vec<Vector> = gens.iter().map(|g| g.scale(1.0 / g.norm2())).collect();
            let k = unit.len();
            let n = cone.ambient_dim;
            // a nonzero a ≥ 0 with Σ a_i ĝ_i = 0 exhibits a line in the cone
            let mut lp = LpProblem::maximize(Vector::filled(k, 1.0)).nonneg().le(Vector::filled(k, 1.0), 1.0);
            for i in 0..n {
                lp = lp.eq(Vector::from(unit.iter().map(|g| g[i]).collect::<Vec<_>>()), 0.0);
            }
            let proper = match solve_lp(&lp)? {
                LpOutcome::Optimal { optimum, .. } => optimum <= 1e-9,
                _ => return Err(Error::Numerical("properness LP not optimal".into())),
            };
            let generating = rank(&unit, 1e-10) == n;
            Ok(ConeReport { proper, generating })
        }
    }
}

/// Checks that `e` is an interior point: `e − ε·Σ ĝ_i ∈ V⁺` for unit-length
/// generators (or `e − ε·I` for the PSD cone), with `ε = 1e-6·‖e‖_∞`.
pub fn is_interior(cone: &ConeSpec, e: &Vector) -> Result<bool> {
    cone.check_dim(e, "order unit")?;
    let eps = 1e-6 * e.max_abs();
    if eps == 0.0 {
        return Ok(false);
    }
    match &cone.kind {
        ConeKind::NonnegOrthant => Ok(e.iter().all(|&c| c > eps)),
        ConeKind::Rays(g) => {
            let mut shifted = e.clone();
            for gi in g {
                shifted = shifted.axpy(-eps / gi.norm2(), gi);
            }
            cone_contains(cone, &shifted, 1e-12)
        }
        ConeKind::Psd { .. } => Ok(eigen_sym(&as_symmetric(e)?)?.min_eigenvalue() > eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from(x.to_vec())
    }

    fn diamond() -> ConeSpec {
        ConeSpec::rays(vec![v(&[1.0, 1.0]), v(&[1.0, -1.0])]).unwrap()
    }

    #[test]
    fn membership() {
        assert!(cone_contains(&ConeSpec::orthant(2), &v(&[1.0, 2.0]), DEFAULT_TOL).unwrap());
        assert!(cone_contains(&diamond(), &v(&[2.0, 0.0]), DEFAULT_TOL).unwrap());
        assert!(!cone_contains(&diamond(), &v(&[0.0, 2.0]), DEFAULT_TOL).unwrap());
        assert!(cone_contains(&diamond(), &v(&[0.0, 0.0]), 0.0).unwrap());
        let psd = ConeSpec::psd(2);
        assert!(cone_contains(&psd, &v(&[2.0, 1.0, 1.0, 2.0]), DEFAULT_TOL).unwrap());
        assert!(!cone_contains(&psd, &v(&[1.0, 2.0, 2.0, 1.0]), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn dual_membership() {
        assert!(dual_cone_contains(&ConeSpec::orthant(2), &v(&[1.0, 1.0]), DEFAULT_TOL).unwrap());
        assert!(dual_cone_contains(&diamond(), &v(&[1.0, -1.0]), DEFAULT_TOL).unwrap());
        assert!(!dual_cone_contains(&ConeSpec::orthant(2), &v(&[1.0, -0.5]), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(cone_contains(&ConeSpec::orthant(3), &v(&[1.0]), DEFAULT_TOL), Err(Error::Input(_))));
        assert!(matches!(dual_cone_contains(&diamond(), &v(&[1.0]), DEFAULT_TOL), Err(Error::Input(_))));
    }

    #[test]
    fn properness() {
        assert_eq!(cone_proper_generating(&ConeSpec::orthant(3)).unwrap(), ConeReport { proper: true, generating: true });
        let line = ConeSpec::rays(vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0])]).unwrap();
        assert_eq!(cone_proper_generating(&line).unwrap(), ConeReport { proper: false, generating: false });
        let wedge = ConeSpec::rays(vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[-1.0, 1.0])]).unwrap();
        assert_eq!(cone_proper_generating(&wedge).unwrap(), ConeReport { proper: true, generating: true });
        assert!(!cone_contains(&wedge, &v(&[-1.0, 0.0]), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn interior_points() {
        assert!(is_interior(&ConeSpec::orthant(2), &v(&[1.0, 1.0])).unwrap());
        assert!(!is_interior(&ConeSpec::orthant(2), &v(&[1.0, 0.0])).unwrap());
        assert!(is_interior(&diamond(), &v(&[1.0, 0.0])).unwrap());
        assert!(!is_interior(&diamond(), &v(&[1.0, 1.0])).unwrap());
        assert!(is_interior(&ConeSpec::psd(2), &v(&[1.0, 0.0, 0.0, 1.0])).unwrap());
    }

    #[test]
    fn rejects_zero_generator() {
        assert!(ConeSpec::rays(vec![v(&[0.0, 0.0])]).is_err());
    }
}
