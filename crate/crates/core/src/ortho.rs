//! Deciding `x ⊥_p y`: `‖x + ky‖^p = ‖x‖^p + ‖ky‖^p` for every real `k`
//! (`‖x + ky‖ = max(‖x‖, ‖ky‖)` when `p = ∞`).
//!
//! For a general norm oracle only a grid of `k` values can be checked, so an
//! `Orthogonal` verdict from [`p_orthogonal_numeric`] is a semi-decision.
//! [`p_orthogonal_exact`] decides the relation exactly for plain coordinate
//! ℓ_p spaces.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cones::{cone_contains, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{rank, Vector};
use crate::spaces::{norm, Exponent, SpaceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Orthogonal,
    NotOrthogonal,
    /// Worst residual fell in the band just above the tolerance.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthoVerdict {
    pub verdict: Verdict,
    pub worst_residual: f64,
    pub witness_k: f64,
    pub k_grid: Vec<f64>,
}

impl OrthoVerdict {
    pub fn is_orthogonal(&self) -> bool {
        self.verdict == Verdict::Orthogonal
    }
}

#[derive(Clone, Debug)]
pub struct OrthoConfig {
    /// Must contain 0 and values of both signs.
    pub k_grid: Vec<f64>,
    /// Relative residual tolerance.
    pub tol: f64,
    /// Residuals in `(tol, inconclusive_factor * tol]` yield `Inconclusive`.
    pub inconclusive_factor: f64,
    /// Triples sampled by the additivity spot check.
    pub additivity_samples: usize,
    pub seed: u64,
}

impl Default for OrthoConfig {
    fn default() -> Self {
        OrthoConfig { k_grid: default_k_grid(), tol: 1e-9, inconclusive_factor: 100.0, additivity_samples: 8, seed: 0 }
    }
}

impl OrthoConfig {
    pub fn with_tol(tol: f64) -> Self {
        OrthoConfig { tol, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        let has_zero = self.k_grid.contains(&0.0);
        let has_pos = self.k_grid.iter().any(|&k| k > 0.0);
        let has_neg = self.k_grid.iter().any(|&k| k < 0.0);
        if !(has_zero && has_pos && has_neg) {
            return Err(Error::input("k grid must contain 0 and values of both signs"));
        }
        if self.k_grid.iter().any(|k| !k.is_finite()) || !(self.tol > 0.0) {
            return Err(Error::input("k grid and tolerance must be finite and positive"));
        }
        Ok(())
    }
}

/// `{0} ∪ {±2^j : j = −8..8}`, ordered by magnitude with the negative value first.
pub fn default_k_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    for j in -8..=8 {
        let k = 2f64.powi(j);
        grid.push(-k);
        grid.push(k);
    }
    grid
}

/// Relative residual of the defining identity at `k`. `nx`, `ny` are the norms
/// of `x` and `y`; `nsum` is `‖x + ky‖`.
fn residual(p: Exponent, nx: f64, ny: f64, k: f64, nsum: f64) -> f64 {
    match p {
        Exponent::Infinity => {
            let rhs = nx.max(k.abs() * ny);
            (nsum - rhs).abs() / rhs
        }
        Exponent::Finite(p) => {
            let rhs = nx.powf(p) + (k.abs() * ny).powf(p);
            (nsum.powf(p) - rhs).abs() / rhs
        }
    }
}

pub fn p_orthogonal_numeric(space: &SpaceSpec, x: &Vector, y: &Vector, p: Exponent, cfg: &OrthoConfig) -> Result<OrthoVerdict> {
    p_orthogonal_by(|v| norm(space, v), x, y, p, cfg)
}

/// Grid decision against an arbitrary norm oracle.
pub fn p_orthogonal_by(norm_of: impl Fn(&Vector) -> Result<f64>, x: &Vector, y: &Vector, p: Exponent, cfg: &OrthoConfig) -> Result<OrthoVerdict> {
    if let Exponent::Finite(q) = p {
        Exponent::new(q)?;
    }
    cfg.validate()?;
    if x.dim() != y.dim() {
        return Err(Error::input("x and y differ in dimension"));
    }
    let nx = norm_of(x)?;
    let ny = norm_of(y)?;
    if nx == 0.0 || ny == 0.0 {
        return Ok(OrthoVerdict { verdict: Verdict::Orthogonal, worst_residual: 0.0, witness_k: 0.0, k_grid: cfg.k_grid.clone() });
    }
    // The grid is evaluated as given and rescaled by ‖x‖/‖y‖. For p = ∞ the
    // rescaled points ±‖x‖/‖y‖ are decisive: k ↦ ‖x̂ + kŷ‖ is convex, so
    // ‖x̂ ± ŷ‖ = 1 forces it to equal max(1, |k|) everywhere.
    let ratio = nx / ny;
    let mut k_grid = cfg.k_grid.clone();
    if ratio != 1.0 {
        k_grid.extend(cfg.k_grid.iter().filter(|&&k| k != 0.0).map(|k| k * ratio));
    }
    let mut worst: f64 = 0.0;
    let mut witness = 0.0;
    for &k in &k_grid {
        let r = residual(p, nx, ny, k, norm_of(&x.axpy(k, y))?);
        if r > worst + 1e-12 * worst.max(cfg.tol) {
            worst = r;
            witness = k;
        }
    }
    let verdict = if worst <= cfg.tol {
        Verdict::Orthogonal
    } else if worst <= cfg.inconclusive_factor * cfg.tol {
        Verdict::Inconclusive
    } else {
        Verdict::NotOrthogonal
    };
    Ok(OrthoVerdict { verdict, worst_residual: worst, witness_k: witness, k_grid })
}

const EXACT_ZERO: f64 = 1e-12;

/// Exact decision in the unweighted coordinate space ℓ_p^n.
///
/// `p = 2`: zero inner product. `p = ∞`: both sides of the identity are
/// maxima of affine functions of `k`, so they agree everywhere iff they agree
/// at every pairwise intersection of those lines and just beyond the extreme
/// ones. Other `p`: disjoint supports.
pub fn p_orthogonal_exact(x: &Vector, y: &Vector, p: Exponent) -> Result<bool> {
    if let Exponent::Finite(q) = p {
        Exponent::new(q)?;
    }
    if x.dim() != y.dim() {
        return Err(Error::input("x and y differ in dimension"));
    }
    match p {
        Exponent::Finite(q) if q == 2.0 => Ok(x.dot(y).abs() <= EXACT_ZERO * (1.0 + x.norm2() * y.norm2())),
        Exponent::Infinity => Ok(sup_orthogonal_exact(x, y)),
        Exponent::Finite(_) => Ok(!x.iter().zip(y.iter()).any(|(a, b)| a.abs() > EXACT_ZERO && b.abs() > EXACT_ZERO)),
    }
}

fn sup_orthogonal_exact(x: &Vector, y: &Vector) -> bool {
    let nx = x.max_abs();
    let ny = y.max_abs();
    if nx == 0.0 || ny == 0.0 {
        return true;
    }
    // lines (intercept, slope)
    let mut lines: Vec<(f64, f64)> = Vec::new();
    for (a, b) in x.iter().zip(y.iter()) {
        lines.push((*a, *b));
        lines.push((-a, -b));
    }
    lines.push((nx, 0.0));
    lines.push((0.0, ny));
    lines.push((0.0, -ny));
    let mut ks = vec![0.0];
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1) = lines[i];
            let (a2, b2) = lines[j];
            if (b1 - b2).abs() > 0.0 {
                ks.push((a2 - a1) / (b1 - b2));
            }
        }
    }
    let lo = ks.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ks.push(lo - 1.0);
    ks.push(hi + 1.0);
    ks.iter().all(|&k| {
        let lhs = x.iter().zip(y.iter()).fold(0.0f64, |m, (a, b)| m.max((a + k * b).abs()));
        let rhs = nx.max(k.abs() * ny);
        (lhs - rhs).abs() <= EXACT_ZERO * rhs.max(1.0)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InftyPairCheck {
    /// `‖û₁ + û₂‖ = 1`
    pub orthogonal: bool,
    pub sum_norm: f64,
    pub diff_norm: f64,
    /// `‖û₁ + û₂‖ = ‖û₁ − û₂‖`, the equivalent form for positive pairs.
    pub sum_equals_diff: bool,
}

/// For nonzero positive `u₁`, `u₂` in a space of class ∞, `u₁ ⊥_∞ u₂` iff the
/// normalised sum has norm one.
pub fn infty_positive_check(space: &SpaceSpec, u1: &Vector, u2: &Vector, tol: f64) -> Result<InftyPairCheck> {
    if !space.p_class.is_infinite() {
        return Err(Error::input("positive ∞-orthogonality test needs a space of class p = ∞"));
    }
    for (name, u) in [("u1", u1), ("u2", u2)] {
        if u.is_zero(0.0) {
            return Err(Error::input(format!("{name} is zero")));
        }
        if !cone_contains(&space.cone, u, DEFAULT_TOL)? {
            return Err(Error::input(format!("{name} is not in the positive cone")));
        }
    }
    let h1 = u1.scale(1.0 / norm(space, u1)?);
    let h2 = u2.scale(1.0 / norm(space, u2)?);
    let sum_norm = norm(space, &(&h1 + &h2))?;
    let diff_norm = norm(space, &(&h1 - &h2))?;
    Ok(InftyPairCheck {
        orthogonal: (sum_norm - 1.0).abs() <= tol,
        sum_norm,
        diff_norm,
        sum_equals_diff: (sum_norm - diff_norm).abs() <= tol,
    })
}

pub fn infty_positive_test(space: &SpaceSpec, u1: &Vector, u2: &Vector) -> Result<bool> {
    Ok(infty_positive_check(space, u1, u2, 1e-9)?.orthogonal)
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityCheck {
    pub samples: usize,
    /// `(x, y, z)` with `x ⊥ y`, `x ⊥ z` but not `x ⊥ (y + z)`.
    pub counterexample: Option<(Vector, Vector, Vector)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthonormalReport {
    pub pairwise_ok: bool,
    pub unit_norms_ok: bool,
    pub total: bool,
    pub independent: bool,
    /// First failing pair `(i, j)` with its verdict.
    pub failing_pair: Option<(usize, usize, OrthoVerdict)>,
    pub additivity_spotcheck: AdditivityCheck,
}

impl OrthonormalReport {
    pub fn passed(&self) -> bool {
        self.pairwise_ok && self.unit_norms_ok && self.additivity_spotcheck.counterexample.is_none()
    }
}

pub fn orthonormal_set_verify(space: &SpaceSpec, set: &[Vector], p: Exponent, cfg: &OrthoConfig) -> Result<OrthonormalReport> {
    if set.is_empty() {
        return Err(Error::input("orthonormal set is empty"));
    }
    for (i, u) in set.iter().enumerate() {
        if u.dim() != space.dim {
            return Err(Error::input(format!("element {i} has the wrong dimension")));
        }
        if u.is_zero(0.0) {
            return Err(Error::input(format!("element {i} is the zero vector")));
        }
    }
    let mut failing_pair = None;
    'outer: for i in 0..set.len() {
        for j in i + 1..set.len() {
            let verdict = p_orthogonal_numeric(space, &set[i], &set[j], p, cfg)?;
            if !verdict.is_orthogonal() {
                failing_pair = Some((i, j, verdict));
                break 'outer;
            }
        }
    }
    let mut unit_norms_ok = true;
    for u in set {
        unit_norms_ok &= (norm(space, u)? - 1.0).abs() <= cfg.tol.max(1e-9);
    }
    let r = rank(set, 1e-10);
    let additivity_spotcheck = if set.len() >= 3 { additivity_spotcheck(space, set, p, cfg)? } else { AdditivityCheck { samples: 0, counterexample: None } };
    Ok(OrthonormalReport {
        pairwise_ok: failing_pair.is_none(),
        unit_norms_ok,
        total: r == space.dim,
        independent: r == set.len(),
        failing_pair,
        additivity_spotcheck,
    })
}

/// Splits the set into two random blocks, draws `x` from the span of one and
/// `y`, `z` from the span of the other, and looks for a failure of additivity.
fn additivity_spotcheck(space: &SpaceSpec, set: &[Vector], p: Exponent, cfg: &OrthoConfig) -> Result<AdditivityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let combo = |rng: &mut ChaCha8Rng, idx: &[usize]| -> Vector {
        let mut v = Vector::zeros(space.dim);
        for &i in idx {
            v = v.axpy(rng.gen_range(-2.0..2.0), &set[i]);
        }
        v
    };
    for _ in 0..cfg.additivity_samples {
        let mut idx: Vec<usize> = (0..set.len()).collect();
        idx.shuffle(&mut rng);
        let cut = rng.gen_range(1..set.len() - 1);
        let (a, b) = idx.split_at(cut);
        let x = combo(&mut rng, a);
        let y = combo(&mut rng, b);
        let z = combo(&mut rng, b);
        if x.is_zero(1e-12) {
            continue;
        }
        let xy = p_orthogonal_numeric(space, &x, &y, p, cfg)?.is_orthogonal();
        let xz = p_orthogonal_numeric(space, &x, &z, p, cfg)?.is_orthogonal();
        if xy && xz && !p_orthogonal_numeric(space, &x, &(&y + &z), p, cfg)?.is_orthogonal() {
            return Ok(AdditivityCheck { samples: cfg.additivity_samples, counterexample: Some((x, y, z)) });
        }
    }
    Ok(AdditivityCheck { samples: cfg.additivity_samples, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from(x.to_vec())
    }

    #[test]
    fn disjoint_basis_vectors() {
        for p in [Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinity] {
            let s = SpaceSpec::lp(3, p);
            let out = p_orthogonal_numeric(&s, &v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0]), p, &OrthoConfig::default()).unwrap();
            assert_eq!(out.verdict, Verdict::Orthogonal, "p = {p}");
        }
    }

    #[test]
    fn euclidean_diagonals() {
        let s = SpaceSpec::lp(2, Exponent::TWO);
        let out = p_orthogonal_numeric(&s, &v(&[1.0, 1.0]), &v(&[1.0, -1.0]), Exponent::TWO, &OrthoConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Orthogonal);
    }

    #[test]
    fn l1_overlap_witness() {
        let s = SpaceSpec::lp(3, Exponent::ONE);
        let out = p_orthogonal_numeric(&s, &v(&[1.0, 1.0, 0.0]), &v(&[0.0, 1.0, 1.0]), Exponent::ONE, &OrthoConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::NotOrthogonal);
        assert_eq!(out.witness_k, -1.0);
        // |‖x − y‖ − (‖x‖ + ‖y‖)| / (‖x‖ + ‖y‖) = |2 − 4| / 4
        assert!((out.worst_residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_arguments_short_circuit() {
        let s = SpaceSpec::lp(2, Exponent::ONE);
        let out = p_orthogonal_numeric(&s, &v(&[0.0, 0.0]), &v(&[1.0, 1.0]), Exponent::ONE, &OrthoConfig::default()).unwrap();
        assert!(out.is_orthogonal());
    }

    #[test]
    fn rejects_small_exponent() {
        let s = SpaceSpec::lp(2, Exponent::ONE);
        let r = p_orthogonal_numeric(&s, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), Exponent::Finite(0.5), &OrthoConfig::default());
        assert!(matches!(r, Err(Error::Input(_))));
        assert!(p_orthogonal_exact(&v(&[1.0]), &v(&[1.0]), Exponent::Finite(0.9)).is_err());
    }

    #[test]
    fn exact_oracle() {
        assert!(p_orthogonal_exact(&v(&[1.0, 0.0, 2.0]), &v(&[0.0, 3.0, 0.0]), Exponent::ONE).unwrap());
        assert!(p_orthogonal_exact(&v(&[1.0, 1.0]), &v(&[1.0, -1.0]), Exponent::TWO).unwrap());
        assert!(!p_orthogonal_exact(&v(&[1.0, 1.0]), &v(&[1.0, -1.0]), Exponent::Finite(4.0)).unwrap());
        let s = SpaceSpec::lp(2, Exponent::Finite(4.0));
        let out = p_orthogonal_numeric(&s, &v(&[1.0, 1.0]), &v(&[1.0, -1.0]), Exponent::Finite(4.0), &OrthoConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::NotOrthogonal);
    }

    #[test]
    fn sup_norm_overlap_can_be_orthogonal() {
        // the shared coordinate never dominates: |0.5 + 0.5k| ≤ max(1, |k|)
        let x = v(&[1.0, 0.0, 0.5]);
        let y = v(&[0.0, 1.0, 0.5]);
        assert!(p_orthogonal_exact(&x, &y, Exponent::Infinity).unwrap());
        let s = SpaceSpec::sup(3);
        assert!(p_orthogonal_numeric(&s, &x, &y, Exponent::Infinity, &OrthoConfig::default()).unwrap().is_orthogonal());
        // a shared peak coordinate breaks it
        assert!(!p_orthogonal_exact(&v(&[1.0, 0.0]), &v(&[0.5, 1.0]), Exponent::Infinity).unwrap());
    }

    #[test]
    fn infty_positive_pairs() {
        let s = SpaceSpec::sup(2);
        assert!(infty_positive_test(&s, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap());
        assert!(!infty_positive_test(&s, &v(&[1.0, 0.5]), &v(&[0.0, 1.0])).unwrap());
        let spec = SpaceSpec::spectral(2);
        assert!(infty_positive_test(&spec, &v(&[1.0, 0.0, 0.0, 0.0]), &v(&[0.0, 0.0, 0.0, 1.0])).unwrap());
        assert!(matches!(infty_positive_test(&s, &v(&[0.0, 0.0]), &v(&[0.0, 1.0])), Err(Error::Input(_))));
        assert!(matches!(infty_positive_test(&s, &v(&[-1.0, 0.0]), &v(&[0.0, 1.0])), Err(Error::Input(_))));
    }

    #[test]
    fn orthonormal_sets() {
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinity] {
            let s = SpaceSpec::lp(4, p);
            let basis: Vec<Vector> = (0..4).map(|i| Vector::unit(4, i)).collect();
            let rep = orthonormal_set_verify(&s, &basis, p, &OrthoConfig::default()).unwrap();
            assert!(rep.passed() && rep.total && rep.independent, "p = {p}");
        }
        let s = SpaceSpec::lp(3, Exponent::TWO);
        let rep = orthonormal_set_verify(&s, &[Vector::unit(3, 0), Vector::unit(3, 1)], Exponent::TWO, &OrthoConfig::default()).unwrap();
        assert!(rep.pairwise_ok && rep.unit_norms_ok && !rep.total);
        let s = SpaceSpec::lp(2, Exponent::ONE);
        let rep = orthonormal_set_verify(&s, &[v(&[1.0, 0.0]), v(&[0.5, 0.5])], Exponent::ONE, &OrthoConfig::default()).unwrap();
        assert!(!rep.pairwise_ok);
        // residual t/(1+t) for t ≤ 2, then 2/(1+t): peak at k = −2
        assert_eq!(rep.failing_pair.as_ref().unwrap().2.witness_k, -2.0);
        assert!(orthonormal_set_verify(&s, &[v(&[0.0, 0.0])], Exponent::ONE, &OrthoConfig::default()).is_err());
    }
}
