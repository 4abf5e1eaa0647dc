//! Support functionals, positive supports and crusts, built explicitly by LP
//! or eigen-decomposition for each norm family.

use serde::Serialize;

use crate::cones::{as_symmetric, cone_contains, dual_cone_contains, pairing, ConeKind, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigen_sym, solve_lp, LpProblem, Matrix, Vector};
use crate::spaces::{congruence, dual_unit_ball, norm, sqrt_pair, Exponent, Functional, NormKind, SpaceSpec};

#[derive(Clone, Debug, Serialize)]
pub struct SupportResult {
    pub functional: Functional,
    pub attained_value: f64,
    pub is_positive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Crust {
    pub support: SupportResult,
    /// `e − u/‖u‖`
    pub partner: Vector,
    /// Whether `u ⊥_∞ partner` passed the normalised-sum test.
    pub partner_verified: bool,
}

fn finish(v: &Vector, f: Functional) -> Result<SupportResult> {
    let attained_value = pairing(&f, v);
    let is_positive = !f.is_zero(0.0) && f.iter().all(|&c| c >= -DEFAULT_TOL);
    Ok(SupportResult { functional: f, attained_value, is_positive })
}

fn finish_in(space: &SpaceSpec, v: &Vector, f: Functional) -> Result<SupportResult> {
    let mut r = finish(v, f)?;
    r.is_positive = dual_cone_contains(&space.cone, &r.functional, DEFAULT_TOL)?;
    Ok(r)
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Index maximising `scale_i · |v_i|`.
fn argmax_scaled(v: &Vector, scale: impl Fn(usize) -> f64) -> usize {
    (0..v.dim()).fold(0, |best, i| if scale(i) * v[i].abs() > scale(best) * v[best].abs() { i } else { best })
}

fn lp_over_dual_ball(space: &SpaceSpec, v: &Vector) -> Result<Functional> {
    let ball = dual_unit_ball(space)?;
    let mut obj = vec![0.0; ball.width()];
    obj[..space.dim].copy_from_slice(v);
    let (_, arg) = solve_lp(&ball.problem(Vector::from(obj), 0))?.into_optimal("support functional")?;
    Ok(Vector::from(arg.as_slice()[..space.dim].to_vec()))
}

/// `s·(Aw)(Aw)ᵀ` flattened.
fn rank_one(a: Option<&Matrix>, w: &Vector, s: f64) -> Functional {
    let w = match a {
        Some(a) => Vector::from((0..a.side()).map(|i| (0..a.side()).map(|j| a[(i, j)] * w[j]).sum()).collect::<Vec<f64>>()),
        None => w.clone(),
    };
    Matrix::outer(&w).scale(s).to_flat()
}

/// A functional `f` with `‖f‖′ = 1` and `f(v) = ‖v‖`.
pub fn support_functional(space: &SpaceSpec, v: &Vector) -> Result<SupportResult> {
    space.check(v, "vector")?;
    if v.is_zero(0.0) {
        return Err(Error::input("support functional needs a nonzero vector"));
    }
    let n = space.dim;
    let f = match (&space.norm, &space.cone.kind) {
        (NormKind::Lp { p: Exponent::Finite(p), weights }, _) => {
            let w = |i: usize| weights.as_ref().map_or(1.0, |w| w[i]);
            let nv = norm(space, v)?;
            Vector::from((0..n).map(|i| w(i) * sign(v[i]) * (v[i].abs() / nv).powf(p - 1.0)).collect::<Vec<_>>())
        }
        (NormKind::Lp { p: Exponent::Infinity, weights }, _) => {
            let w = |i: usize| weights.as_ref().map_or(1.0, |w| w[i]);
            let i = argmax_scaled(v, w);
            Vector::unit(n, i).scale(sign(v[i]) * w(i))
        }
        (NormKind::Sup, _) => lp_over_dual_ball(space, v)?,
        (NormKind::OrderUnit { e }, ConeKind::Psd { .. }) => {
            let (_, inv_half) = sqrt_pair(&as_symmetric(e)?)?;
            let d = eigen_sym(&congruence(&inv_half, &as_symmetric(v)?))?;
            let top = top_abs(&d.eigenvalues);
            rank_one(Some(&inv_half), &d.eigenvectors[top], sign(d.eigenvalues[top]))
        }
        (NormKind::Base { phi }, ConeKind::Psd { .. }) => {
            let (half, _) = sqrt_pair(&as_symmetric(phi)?)?;
            let s = eigen_sym(&congruence(&half, &as_symmetric(v)?))?.apply(sign);
            congruence(&half, &s).to_flat()
        }
        (NormKind::OrderUnit { .. } | NormKind::Base { .. }, _) => lp_over_dual_ball(space, v)?,
        (NormKind::Spectral, _) => {
            let d = eigen_sym(&as_symmetric(v)?)?;
            let top = top_abs(&d.eigenvalues);
            rank_one(None, &d.eigenvectors[top], sign(d.eigenvalues[top]))
        }
    };
    finish_in(space, v, f)
}

fn top_abs(eigenvalues: &[f64]) -> usize {
    (0..eigenvalues.len()).fold(0, |b, i| if eigenvalues[i].abs() > eigenvalues[b].abs() { i } else { b })
}

fn require_positive(space: &SpaceSpec, u: &Vector) -> Result<()> {
    space.check(u, "vector")?;
    if u.is_zero(0.0) {
        return Err(Error::input("u is zero"));
    }
    if !cone_contains(&space.cone, u, DEFAULT_TOL)? {
        return Err(Error::input("u is not in the positive cone"));
    }
    Ok(())
}

/// `max f(u)` over `f` in the dual cone with the given extra rows, `f` free.
fn dual_cone_lp(space: &SpaceSpec, objective: &Vector, eq: Vec<(Vector, f64)>, le: Vec<(Vector, f64)>) -> Result<Option<(f64, Functional)>> {
    let n = space.dim;
    let mut lp = LpProblem::maximize(objective.clone());
    for g in space.cone.generators().expect("polyhedral cone") {
        lp = lp.ge(g, 0.0);
    }
    for (r, b) in eq {
        lp = lp.eq(r, b);
    }
    for (r, b) in le {
        lp = lp.le(r, b);
    }
    debug_assert_eq!(objective.dim(), n);
    Ok(match solve_lp(&lp)? {
        crate::linalg::LpOutcome::Optimal { optimum, argument } => Some((optimum, argument)),
        _ => None,
    })
}

/// A positive functional supporting `u ∈ V⁺∖{0}`.
pub fn positive_support(space: &SpaceSpec, u: &Vector) -> Result<SupportResult> {
    require_positive(space, u)?;
    let f = match (&space.norm, &space.cone.kind) {
        (NormKind::OrderUnit { e }, ConeKind::NonnegOrthant | ConeKind::Rays(_)) => {
            // for positive f, ‖f‖′ = f(e)
            let (_, f) = dual_cone_lp(space, u, vec![(e.clone(), 1.0)], vec![])?
                .ok_or_else(|| Error::Numerical("positive support LP not optimal".into()))?;
            f
        }
        (NormKind::Base { phi }, ConeKind::NonnegOrthant | ConeKind::Rays(_)) => {
            let rows = space.cone.generators().unwrap().into_iter().map(|g| {
                let b = phi.dot(&g);
                (g, b)
            });
            let (_, f) = dual_cone_lp(space, u, vec![], rows.collect())?
                .ok_or_else(|| Error::Numerical("positive support LP not optimal".into()))?;
            f
        }
        (NormKind::Base { phi }, ConeKind::Psd { .. }) => phi.clone(),
        _ => {
            // the sign choices above produce positive functionals on positive input
            let r = support_functional(space, u)?;
            r.functional.map(|c| if c.abs() < 1e-15 { 0.0 } else { c })
        }
    };
    let r = finish_in(space, u, f)?;
    if !r.is_positive {
        return Err(Error::Numerical("constructed support is not positive".into()));
    }
    Ok(r)
}

/// A positive norm-one functional vanishing on `u`, if one exists, in an
/// order-unit space. Alongside it, the partner `e − û`.
pub fn crust_probe(space: &SpaceSpec, u: &Vector) -> Result<Option<Crust>> {
    let e = space
        .order_unit_element()
        .ok_or_else(|| Error::input(format!("crust probe needs an order-unit space, got {}", space.describe())))?;
    require_positive(space, u)?;
    let f = match &space.cone.kind {
        ConeKind::Psd { .. } => {
            // a null vector w of U gives f = wwᵀ / (wᵀEw)
            let um = as_symmetric(u)?;
            let d = eigen_sym(&um)?;
            let last = d.eigenvalues.len() - 1;
            if d.eigenvalues[last] > 1e-9 * d.max_abs_eigenvalue() {
                return Ok(None);
            }
            let w = &d.eigenvectors[last];
            let f = Matrix::outer(w).to_flat();
            let fe = pairing(&f, &e);
            f.scale(1.0 / fe)
        }
        _ => {
            let Some((opt, f)) = dual_cone_lp(space, &e, vec![(u.clone(), 0.0)], vec![(e.clone(), 1.0)])? else {
                return Ok(None);
            };
            if opt < 1.0 - 1e-9 {
                return Ok(None);
            }
            f
        }
    };
    let support = finish_in(space, u, f)?;
    let partner = e.axpy(-1.0 / norm(space, u)?, u);
    let partner_verified = if partner.is_zero(1e-12) {
        false
    } else {
        let h1 = u.scale(1.0 / norm(space, u)?);
        let h2 = partner.scale(1.0 / norm(space, &partner)?);
        (norm(space, &(&h1 + &h2))? - 1.0).abs() <= 1e-9
    };
    Ok(Some(Crust { support, partner, partner_verified }))
}
