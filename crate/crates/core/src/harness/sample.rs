//! Random elements, pairs and orthonormal sets for each space family.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::cones::{as_symmetric, ConeKind, ConeSpec};
use crate::error::Result;
use crate::linalg::{eigen_sym, rank, Matrix, Vector};
use crate::ortho::infty_positive_test;
use crate::spaces::{norm, sqrt_pair, Exponent, NormKind, SpaceSpec};
use crate::support::positive_support;

/// A named default space.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub space: SpaceSpec,
}

/// ℓ1 cone in ℝ⁴: generators `(1, ±e_j)`, so `x₀ ≥ |x₁| + |x₂| + |x₃|`.
pub fn l1_cone_4() -> ConeSpec {
    let mut gens = Vec::new();
    for j in 1..4 {
        for s in [1.0, -1.0] {
            let mut g = vec![0.0; 4];
            g[0] = 1.0;
            g[j] = s;
            gens.push(Vector::from(g));
        }
    }
    ConeSpec::rays(gens).expect("valid generators")
}

pub fn default_families() -> Vec<Family> {
    let mut out = Vec::new();
    for p in [1.0, 1.5, 2.0, 3.0] {
        out.push(Family { name: format!("l{p}_8"), space: SpaceSpec::lp(8, Exponent::Finite(p)) });
    }
    let fam = |name: &str, space: crate::Result<SpaceSpec>| Family { name: name.to_string(), space: space.expect("default family is valid") };
    out.push(fam("sup_order_unit_8", SpaceSpec::order_unit(ConeSpec::orthant(8), Vector::filled(8, 1.0))));
    out.push(fam("base_8", SpaceSpec::base(ConeSpec::orthant(8), Vector::from((0..8).map(|i| 1.0 + i as f64 / 4.0).collect::<Vec<_>>()))));
    out.push(Family { name: "spectral_4".into(), space: SpaceSpec::spectral(4) });
    out.push(fam("rays_order_unit_4", SpaceSpec::order_unit(l1_cone_4(), Vector::unit(4, 0))));
    out
}

pub(crate) fn exp(rng: &mut ChaCha8Rng) -> f64 {
    Exp1.sample(rng)
}

pub(crate) fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| gauss(rng)).collect()).collect()
}

/// `B Bᵀ` for a `side × r` Gaussian `B`.
fn gram(rng: &mut ChaCha8Rng, side: usize, r: usize) -> Vector {
    let b = gaussian_matrix(rng, side, r);
    let rows: Vec<Vec<f64>> = (0..side).map(|i| (0..side).map(|j| (0..r).map(|k| b[i][k] * b[j][k]).sum()).collect()).collect();
    Matrix::from_rows(&rows).expect("square").symmetrized().to_flat()
}

/// `(B + Bᵀ)/2` for a Gaussian `B`.
fn gaussian_symmetric(rng: &mut ChaCha8Rng, side: usize) -> Matrix {
    let b = gaussian_matrix(rng, side, side);
    let rows: Vec<Vec<f64>> = (0..side).map(|i| (0..side).map(|j| (b[i][j] + b[j][i]) / 2.0).collect()).collect();
    Matrix::from_rows(&rows).expect("square")
}

/// `Σ a_i g_i` with `a_i ~ Exp(1)`; a Gram matrix for the PSD cone.
pub fn sample_cone_with(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Vector {
    match &space.cone.kind {
        ConeKind::NonnegOrthant => Vector::from((0..space.dim).map(|_| exp(rng)).collect::<Vec<_>>()),
        ConeKind::Rays(g) => {
            let mut x = Vector::zeros(space.dim);
            for gi in g {
                x = x.axpy(exp(rng), gi);
            }
            x
        }
        ConeKind::Psd { side } => gram(rng, *side, *side),
    }
}

pub fn sample_cone(space: &SpaceSpec, seed: u64) -> Vector {
    sample_cone_with(space, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A positive element on a proper face: some coordinates zero, a rank
/// deficient Gram matrix, or a combination of generators sharing a facet.
pub fn sample_face(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Vector {
    match &space.cone.kind {
        ConeKind::NonnegOrthant => {
            let n = space.dim;
            let keep = rng.gen_range(1..n.max(2));
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(rng);
            let mut x = vec![0.0; n];
            for &i in &idx[..keep.min(n)] {
                x[i] = exp(rng);
            }
            Vector::from(x)
        }
        ConeKind::Psd { side } => {
            let r = rng.gen_range(1..(*side).max(2));
            gram(rng, *side, r)
        }
        ConeKind::Rays(g) => {
            // for the ℓ1 cone pick one sign per axis; otherwise a random subset
            let mut x = Vector::zeros(space.dim);
            let mut used = 0;
            for pair in g.chunks(2) {
                if rng.gen_bool(0.6) {
                    x = x.axpy(exp(rng), &pair[rng.gen_range(0..pair.len())]);
                    used += 1;
                }
            }
            if used == 0 {
                x = x.axpy(exp(rng), &g[rng.gen_range(0..g.len())]);
            }
            x
        }
    }
}

/// A generic element: Gaussian coordinates, symmetrised for matrices.
pub fn sample_vector(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Vector {
    match &space.cone.kind {
        ConeKind::Psd { side } => gaussian_symmetric(rng, *side).to_flat(),
        _ => Vector::from((0..space.dim).map(|_| gauss(rng)).collect::<Vec<_>>()),
    }
}

/// A point of the dual cone.
pub fn sample_dual_cone(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Result<Vector> {
    Ok(match &space.cone.kind {
        ConeKind::NonnegOrthant | ConeKind::Psd { .. } => sample_cone_with(space, rng),
        ConeKind::Rays(_) => {
            // positive supports are dual-cone elements
            let mut f = Vector::zeros(space.dim);
            for _ in 0..3 {
                let u = sample_face(space, rng);
                f = f.axpy(exp(rng), &positive_support(space, &u)?.functional);
            }
            f
        }
    })
}

/// Splits a shuffled prefix of `0..n` into `m` nonempty blocks.
fn blocks(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let used = rng.gen_range(m..=n);
    let mut cuts: Vec<usize> = (1..used).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(m);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(used)) {
        out.push(idx[start..c].to_vec());
        start = c;
    }
    out
}

/// Matrix `A` turning orthogonal-range PSD blocks into orthogonal elements via
/// `P ↦ A P A` for the family's norm.
fn psd_frame(space: &SpaceSpec) -> Result<Option<Matrix>> {
    Ok(match &space.norm {
        NormKind::Spectral => Some(Matrix::identity(space.cone.psd_side().unwrap_or(0))),
        NormKind::OrderUnit { e } => Some(sqrt_pair(&as_symmetric(e)?)?.0),
        NormKind::Base { phi } => Some(sqrt_pair(&as_symmetric(phi)?)?.1),
        _ => None,
    })
}

fn random_orthonormal_basis(rng: &mut ChaCha8Rng, side: usize) -> Result<Vec<Vector>> {
    Ok(eigen_sym(&gaussian_symmetric(rng, side))?.eigenvectors)
}

/// Mutually orthogonal positive elements, one per block: disjoint supports
/// on the orthant, orthogonal ranges on PSD cones, `(u, e − û)` for ray cones
/// with an order unit. `None` when no construction applies.
pub fn orthogonal_positive_set(space: &SpaceSpec, rng: &mut ChaCha8Rng, m: usize) -> Result<Option<Vec<Vector>>> {
    Ok(match &space.cone.kind {
        ConeKind::NonnegOrthant => {
            let m = m.min(space.dim).max(1);
            let set = blocks(rng, space.dim, m)
                .into_iter()
                .map(|b| {
                    let mut x = vec![0.0; space.dim];
                    for i in b {
                        x[i] = 0.05 + exp(rng);
                    }
                    Vector::from(x)
                })
                .collect();
            Some(set)
        }
        ConeKind::Psd { side } => {
            let Some(frame) = psd_frame(space)? else { return Ok(None) };
            let q = random_orthonormal_basis(rng, *side)?;
            let m = m.min(*side).max(1);
            let mut set = Vec::new();
            for b in blocks(rng, *side, m) {
                let mut p = Matrix::zeros(*side);
                for i in b {
                    p = p.add_scaled(0.05 + exp(rng), &Matrix::outer(&q[i]));
                }
                set.push(crate::spaces::congruence(&frame, &p).to_flat());
            }
            Some(set)
        }
        ConeKind::Rays(_) => {
            let Some(e) = space.order_unit_element() else { return Ok(None) };
            for _ in 0..20 {
                let u = sample_face(space, rng);
                let partner = e.axpy(-1.0 / norm(space, &u)?, &u);
                if partner.max_abs() > 1e-6 && infty_positive_test(space, &u, &partner).unwrap_or(false) {
                    let set = if m >= 2 { vec![u, partner.scale(0.05 + exp(rng))] } else { vec![u] };
                    return Ok(Some(set));
                }
            }
            None
        }
    })
}

pub fn normalized(space: &SpaceSpec, set: Vec<Vector>) -> Result<Vec<Vector>> {
    set.into_iter().map(|u| Ok(u.scale(1.0 / norm(space, &u)?))).collect()
}

/// An orthonormal set inside the cone, of random size up to `max`.
pub fn positive_orthonormal_set(space: &SpaceSpec, rng: &mut ChaCha8Rng, max: usize) -> Result<Option<Vec<Vector>>> {
    let m = rng.gen_range(1..=max.max(1));
    match orthogonal_positive_set(space, rng, m)? {
        Some(set) => Ok(Some(normalized(space, set)?)),
        None => Ok(None),
    }
}

/// An orthonormal set with arbitrary signs: rotated frames for unweighted
/// ℓ2, signed disjoint blocks otherwise.
pub fn signed_orthonormal_set(space: &SpaceSpec, rng: &mut ChaCha8Rng, max: usize) -> Result<Option<Vec<Vector>>> {
    let m = rng.gen_range(1..=max.max(1)).min(space.dim);
    if matches!(space.norm, NormKind::Lp { p: Exponent::Finite(p), weights: None } if p == 2.0) {
        let q = random_orthonormal_basis(rng, space.dim)?;
        return Ok(Some(q.into_iter().take(m).collect()));
    }
    let Some(set) = orthogonal_positive_set(space, rng, m)? else { return Ok(None) };
    if !matches!(space.cone.kind, ConeKind::NonnegOrthant) {
        return Ok(Some(normalized(space, set)?));
    }
    let signed = set.into_iter().map(|u| if rng.gen_bool(0.5) { u.scale(-1.0) } else { u }).collect();
    Ok(Some(normalized(space, signed)?))
}

fn independent(u1: &Vector, u2: &Vector) -> bool {
    !u1.is_zero(0.0) && !u2.is_zero(0.0) && rank(&[u1.clone(), u2.clone()], 1e-9) == 2
}

/// Positive pairs mixing independent samples, structurally orthogonal pairs
/// and face samples (with the partner `e − û` in order-unit spaces).
pub fn positive_pair(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Result<(Vector, Vector)> {
    for _ in 0..50 {
        let (u1, u2) = match rng.gen_range(0..3) {
            0 => (sample_cone_with(space, rng), sample_cone_with(space, rng)),
            1 => match orthogonal_positive_set(space, rng, 2)? {
                Some(set) if set.len() == 2 => (set[0].clone(), set[1].clone()),
                _ => (sample_face(space, rng), sample_face(space, rng)),
            },
            _ => {
                let u = sample_face(space, rng);
                match space.order_unit_element() {
                    Some(e) if rng.gen_bool(0.5) => {
                        let partner = e.axpy(-1.0 / norm(space, &u)?, &u);
                        (u, partner.scale(0.05 + exp(rng)))
                    }
                    _ => (u, sample_face(space, rng)),
                }
            }
        };
        if independent(&u1, &u2) {
            return Ok(if rng.gen_bool(0.5) { (u1, u2) } else { (u2, u1) });
        }
    }
    Err(crate::Error::Numerical("could not sample an independent positive pair".into()))
}

/// An orthogonal positive pair with both members nonzero and independent.
pub fn orthogonal_pair(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Result<Option<(Vector, Vector)>> {
    for _ in 0..20 {
        match orthogonal_positive_set(space, rng, 2)? {
            None => return Ok(None),
            Some(set) if set.len() == 2 && independent(&set[0], &set[1]) => {
                // vary the relative size
                let t = 10f64.powf(rng.gen_range(-3.0..1.0));
                return Ok(Some((set[0].clone(), set[1].scale(t))));
            }
            Some(_) => {}
        }
    }
    Ok(None)
}
