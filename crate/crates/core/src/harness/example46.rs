//! Two different ⊥∞ positive decompositions of `cos` sampled on a grid.

use serde::Serialize;
use std::f64::consts::PI;

use crate::cones::{cone_contains, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::ortho::{p_orthogonal_numeric, OrthoConfig};
use crate::spaces::{norm, Exponent, SpaceSpec};

#[derive(Clone, Debug, Serialize)]
pub struct Example46 {
    pub n: usize,
    pub grid: Vec<f64>,
    pub f: Vector,
    pub f_plus: Vector,
    pub f_minus: Vector,
    pub g1: Vector,
    pub g2: Vector,
}

#[derive(Clone, Debug, Serialize)]
pub struct Example46Certificate {
    pub n: usize,
    /// `max |f − (f⁺ − f⁻)|`
    pub residual_lattice: f64,
    /// `max |f − (g₁ − g₂)|`
    pub residual_squares: f64,
    pub norm_lattice_hat_sum: f64,
    pub norm_squares_hat_sum: f64,
    pub norm_f_plus: f64,
    pub norm_f_minus: f64,
    pub norm_g1: f64,
    pub norm_g2: f64,
    pub max_gap: f64,
    pub numeric_lattice_orthogonal: bool,
    pub numeric_squares_orthogonal: bool,
    pub all_positive: bool,
}

impl Example46Certificate {
    /// The gap 1/2 is attained at `π/2`, which is a grid point iff `4 | n − 1`.
    pub fn grid_has_quarter(&self) -> bool {
        (self.n - 1) % 4 == 0
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.residual_lattice <= tol
            && self.residual_squares <= tol
            && (self.norm_lattice_hat_sum - 1.0).abs() <= tol
            && (self.norm_squares_hat_sum - 1.0).abs() <= tol
            && self.max_gap > tol
            && (!self.grid_has_quarter() || (self.max_gap - 0.5).abs() <= tol)
            && self.numeric_lattice_orthogonal
            && self.numeric_squares_orthogonal
            && self.all_positive
    }
}

/// Grid `x_j = 2πj/(n−1)`, `f = cos`, lattice parts and `cos²(x/2)`, `sin²(x/2)`.
pub fn build_example_46(n: usize) -> Result<Example46> {
    if n < 3 {
        return Err(Error::input(format!("grid needs at least 3 points, got {n}")));
    }
    let grid: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / (n - 1) as f64).collect();
    let f = Vector::from(grid.iter().map(|x| x.cos()).collect::<Vec<_>>());
    let f_plus = f.map(|c| c.max(0.0));
    let f_minus = f.map(|c| (-c).max(0.0));
    let g1 = Vector::from(grid.iter().map(|x| (x / 2.0).cos().powi(2)).collect::<Vec<_>>());
    // sin²(x/2) taken as 1 − g1 so that g1 + g2 = e holds in floating point
    let g2 = g1.map(|g| 1.0 - g);
    Ok(Example46 { n, grid, f, f_plus, f_minus, g1, g2 })
}

/// The sup-norm order-unit space on the grid, unit all ones.
pub fn grid_space(n: usize) -> Result<SpaceSpec> {
    SpaceSpec::order_unit(ConeSpec::orthant(n), Vector::filled(n, 1.0))
}

fn hat_sum(space: &SpaceSpec, a: &Vector, b: &Vector) -> Result<f64> {
    let s = a.scale(1.0 / norm(space, a)?).axpy(1.0 / norm(space, b)?, b);
    norm(space, &s)
}

pub fn certify_example_46(ex: &Example46, tol: f64) -> Result<Example46Certificate> {
    let space = grid_space(ex.n)?;
    let lattice = &ex.f_plus - &ex.f_minus;
    let squares = &ex.g1 - &ex.g2;
    let cfg = OrthoConfig::with_tol(tol);
    let mut all_positive = true;
    for u in [&ex.f_plus, &ex.f_minus, &ex.g1, &ex.g2] {
        all_positive &= cone_contains(&space.cone, u, 0.0)?;
    }
    Ok(Example46Certificate {
        n: ex.n,
        residual_lattice: (&ex.f - &lattice).max_abs(),
        residual_squares: (&ex.f - &squares).max_abs(),
        norm_lattice_hat_sum: hat_sum(&space, &ex.f_plus, &ex.f_minus)?,
        norm_squares_hat_sum: hat_sum(&space, &ex.g1, &ex.g2)?,
        norm_f_plus: norm(&space, &ex.f_plus)?,
        norm_f_minus: norm(&space, &ex.f_minus)?,
        norm_g1: norm(&space, &ex.g1)?,
        norm_g2: norm(&space, &ex.g2)?,
        max_gap: (&ex.f_plus - &ex.g1).max_abs(),
        numeric_lattice_orthogonal: p_orthogonal_numeric(&space, &ex.f_plus, &ex.f_minus, Exponent::Infinity, &cfg)?.is_orthogonal(),
        numeric_squares_orthogonal: p_orthogonal_numeric(&space, &ex.g1, &ex.g2, Exponent::Infinity, &cfg)?.is_orthogonal(),
        all_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_certifies() {
        let ex = build_example_46(2049).unwrap();
        let c = certify_example_46(&ex, 1e-12).unwrap();
        assert!(c.passed(1e-12), "{c:?}");
        assert_eq!(c.norm_f_plus, 1.0);
        assert_eq!(c.norm_g1, 1.0);
        assert_eq!(c.norm_lattice_hat_sum, 1.0);
        assert_eq!(c.norm_squares_hat_sum, 1.0);
        assert!(ex.g1.iter().zip(ex.g2.iter()).all(|(a, b)| a + b == 1.0));
    }

    #[test]
    fn tiny_grid_rejected() {
        assert!(build_example_46(2).is_err());
        let ex = build_example_46(5).unwrap();
        let close = |a: &Vector, b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(&ex.f, &[1.0, 0.0, -1.0, 0.0, 1.0]));
        assert!(close(&ex.f_plus, &[1.0, 0.0, 0.0, 0.0, 1.0]));
        assert!(close(&ex.f_minus, &[0.0, 0.0, 1.0, 0.0, 0.0]));
        assert!(close(&ex.g1, &[1.0, 0.5, 0.0, 0.5, 1.0]));
        assert!(close(&ex.g2, &[0.0, 0.5, 1.0, 0.5, 0.0]));
        // x = 0, π, 2π: both decompositions coincide on this grid
        let c = certify_example_46(&build_example_46(3).unwrap(), 1e-12).unwrap();
        assert!(!c.passed(1e-12));
        let c = certify_example_46(&build_example_46(7).unwrap(), 1e-12).unwrap();
        assert!(c.passed(1e-12) && c.max_gap < 0.5);
    }
}
