//! Decompositions `v = u₁ − u₂` with positive parts, the dual decomposition of
//! functionals, and coordinates for spans of orthonormal sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cones::{as_symmetric, cone_contains, ConeKind, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigen_sym, least_squares, solve_lp, LpOutcome, LpProblem, Matrix, Vector};
use crate::ortho::{infty_positive_check, orthonormal_set_verify, p_orthogonal_by, p_orthogonal_numeric, OrthoConfig, OrthoVerdict, Verdict};
use crate::spaces::{congruence, dual_norm, dual_unit_ball, norm, sqrt_pair, unit_ball, BallLp, Exponent, Functional, NormKind, SpaceSpec};
use crate::support::support_functional;

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub u1: Vector,
    pub u2: Vector,
    pub p: Exponent,
    /// `(‖u₁‖^p + ‖u₂‖^p)^{1/p}`, or the max for `p = ∞`.
    pub norm_aggregate: f64,
    pub ortho_verdict: Option<OrthoVerdict>,
}

#[derive(Clone, Debug)]
pub struct DecompConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    /// Iterations between doublings of the penalty weight.
    pub penalty_doubling: usize,
}

impl Default for DecompConfig {
    fn default() -> Self {
        DecompConfig { epsilon: 1e-6, max_iters: 5000, penalty_doubling: 50 }
    }
}

fn decomposition(space: &SpaceSpec, u1: Vector, u2: Vector, p: Exponent) -> Result<Decomposition> {
    let norm_aggregate = p.aggregate(norm(space, &u1)?, norm(space, &u2)?);
    Ok(Decomposition { u1, u2, p, norm_aggregate, ortho_verdict: None })
}

// ---- LP assembly ----

/// Columns are nonnegative unless listed as free.
#[derive(Default)]
struct Builder {
    width: usize,
    eq: Vec<(Vec<f64>, f64)>,
    le: Vec<(Vec<f64>, f64)>,
    free: Vec<usize>,
}

impl Builder {
    fn alloc(&mut self, k: usize) -> usize {
        self.width += k;
        self.width - k
    }

    fn alloc_free(&mut self, k: usize) -> usize {
        let start = self.alloc(k);
        self.free.extend(start..start + k);
        start
    }

    fn row(&self, entries: &[(usize, f64)]) -> Vec<f64> {
        let mut row = vec![0.0; self.width];
        for &(c, x) in entries {
            row[c] += x;
        }
        row
    }

    /// `x ∈ t·B` where `x_i = Σ x_rows[i]` over existing columns.
    fn scaled_ball(&mut self, ball: &BallLp, x_rows: &[Vec<(usize, f64)>], t: usize) {
        let z = self.alloc(ball.n_aux);
        for (rows, is_eq) in [(&ball.eq, true), (&ball.le, false)] {
            for (r, rhs) in rows {
                let mut row = vec![0.0; self.width];
                for (i, xr) in x_rows.iter().enumerate() {
                    if r[i] != 0.0 {
                        for &(c, m) in xr {
                            row[c] += r[i] * m;
                        }
                    }
                }
                for j in 0..ball.n_aux {
                    row[z + j] += r[ball.n + j];
                }
                row[t] -= rhs;
                if is_eq {
                    self.eq.push((row, 0.0));
                } else {
                    self.le.push((row, 0.0));
                }
            }
        }
    }

    fn solve_min(&self, obj: &[(usize, f64)]) -> Result<LpOutcome> {
        let pad = |r: &Vec<f64>| {
            let mut r = r.clone();
            r.resize(self.width, 0.0);
            Vector::from(r)
        };
        let mut lp = LpProblem::minimize(Vector::from(self.row(obj))).nonneg();
        for &c in &self.free {
            lp.lower_bounds[c] = None;
        }
        for (r, b) in &self.eq {
            lp = lp.eq(pad(r), *b);
        }
        for (r, b) in &self.le {
            lp = lp.le(pad(r), *b);
        }
        solve_lp(&lp)
    }
}

fn combine(gens: &[Vector], coeffs: &[f64]) -> Vector {
    let mut out = Vector::zeros(gens[0].dim());
    for (g, &a) in gens.iter().zip(coeffs) {
        if a != 0.0 {
            out = out.axpy(a, g);
        }
    }
    out
}

/// Minimises `‖u₁‖ + ‖u₂‖` (p = 1) or `max` (p = ∞) over `u₁ = Ga`, `u₂ = Gb`,
/// `G(a − b) = v`. For p = ∞ ties are broken by the smallest sum.
fn decompose_lp(space: &SpaceSpec, v: &Vector, p: Exponent) -> Result<Decomposition> {
    let gens = space.cone.generators().expect("polyhedral cone");
    let ball = unit_ball(space)?;
    let (n, k) = (space.dim, gens.len());
    let mut b = Builder::default();
    let a0 = b.alloc(k);
    let b0 = b.alloc(k);
    let rows = |off: usize| -> Vec<Vec<(usize, f64)>> { (0..n).map(|i| (0..k).map(|j| (off + j, gens[j][i])).collect()).collect() };
    let (ra, rb) = (rows(a0), rows(b0));
    let t1 = b.alloc(1);
    let t2 = b.alloc(1);
    b.scaled_ball(&ball, &ra, t1);
    b.scaled_ball(&ball, &rb, t2);
    for i in 0..n {
        let mut entries = ra[i].clone();
        entries.extend(rb[i].iter().map(|&(c, x)| (c, -x)));
        let row = b.row(&entries);
        b.eq.push((row, v[i]));
    }
    let infeasible = || Error::input("vector is not in the span of the cone");
    let arg = if p.is_infinite() {
        let s = b.alloc(1);
        for t in [t1, t2] {
            let row = b.row(&[(t, 1.0), (s, -1.0)]);
            b.le.push((row, 0.0));
        }
        let first = match b.solve_min(&[(s, 1.0)])? {
            LpOutcome::Optimal { argument, .. } => argument,
            LpOutcome::Infeasible => return Err(infeasible()),
            LpOutcome::Unbounded => return Err(Error::Numerical("decomposition LP unbounded".into())),
        };
        let s_star = first[s];
        let row = b.row(&[(s, 1.0)]);
        b.le.push((row, s_star + 1e-10 * s_star.max(1.0)));
        b.solve_min(&[(t1, 1.0), (t2, 1.0)])?.into_optimal("decomposition tie-break")?.1
    } else {
        match b.solve_min(&[(t1, 1.0), (t2, 1.0)])? {
            LpOutcome::Optimal { argument, .. } => argument,
            LpOutcome::Infeasible => return Err(infeasible()),
            LpOutcome::Unbounded => return Err(Error::Numerical("decomposition LP unbounded".into())),
        }
    };
    let u1 = combine(&gens, &arg.as_slice()[a0..a0 + k]);
    let u2 = &u1 - v;
    decomposition(space, u1, clean(u2), p)
}

/// Zeroes entries at rounding level.
fn clean(x: Vector) -> Vector {
    let s = x.max_abs();
    x.map(|c| if c.abs() <= 1e-13 * s.max(1.0) { 0.0 } else { c })
}

// ---- positive parts for PSD cones ----

fn spectral_parts(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let d = eigen_sym(m)?;
    let thr = 1e-10 * d.max_abs_eigenvalue();
    Ok((d.apply(|l| if l > thr { l } else { 0.0 }), d.apply(|l| if l < -thr { -l } else { 0.0 })))
}

/// Positive parts `A P± A` of `P = B v B` where `(A, B)` are the congruences
/// attached to the norm family.
fn psd_parts(space: &SpaceSpec, v: &Vector) -> Result<(Vector, Vector)> {
    let m = as_symmetric(v)?;
    let (outer, inner) = match &space.norm {
        NormKind::Spectral => return spectral_parts(&m).map(|(a, b)| (a.to_flat(), b.to_flat())),
        NormKind::OrderUnit { e } => {
            let (half, inv_half) = sqrt_pair(&as_symmetric(e)?)?;
            (half, inv_half)
        }
        NormKind::Base { phi } => {
            let (half, inv_half) = sqrt_pair(&as_symmetric(phi)?)?;
            (inv_half, half)
        }
        NormKind::Lp { .. } | NormKind::Sup => return Err(Error::unsupported(format!("no positive-part rule for {}", space.describe()))),
    };
    let (pos, neg) = spectral_parts(&congruence(&inner, &m))?;
    Ok((congruence(&outer, &pos).to_flat(), congruence(&outer, &neg).to_flat()))
}

fn coordinate_parts(v: &Vector) -> (Vector, Vector) {
    (v.map(|c| c.max(0.0)), v.map(|c| (-c).max(0.0)))
}

// ---- projected gradient ----

/// `(J, ∇J)` for `J = ‖u‖^p` (or `‖u‖` when `p = ∞`).
fn norm_pow(space: &SpaceSpec, u: &Vector, p: Exponent) -> Result<(f64, Vector)> {
    let nu = norm(space, u)?;
    if nu == 0.0 {
        return Ok((0.0, Vector::zeros(u.dim())));
    }
    let f = support_functional(space, u)?.functional;
    Ok(match p {
        Exponent::Infinity => (nu, f),
        Exponent::Finite(p) => (nu.powf(p), f.scale(p * nu.powf(p - 1.0))),
    })
}

fn objective(space: &SpaceSpec, u1: &Vector, u2: &Vector, p: Exponent) -> Result<(f64, Vector, Vector)> {
    let (j1, g1) = norm_pow(space, u1, p)?;
    let (j2, g2) = norm_pow(space, u2, p)?;
    Ok(match p {
        Exponent::Infinity if j1 >= j2 => (j1, g1, Vector::zeros(u2.dim())),
        Exponent::Infinity => (j2, Vector::zeros(u1.dim()), g2),
        Exponent::Finite(_) => (j1 + j2, g1, g2),
    })
}

fn no_convergence(iterations: usize, gap: f64) -> Error {
    Error::NoConvergence { iterations, gap }
}

/// Orthant: `u₂ = b ≥ max(0, −v)`, `u₁ = v + b`; starts at the lattice parts.
fn gradient_orthant(space: &SpaceSpec, v: &Vector, p: Exponent, target: f64, cfg: &DecompConfig) -> Result<Decomposition> {
    let lo = v.map(|c| (-c).max(0.0));
    let mut b = lo.clone();
    let mut step = 1.0;
    for iter in 0..cfg.max_iters {
        let u1 = v + &b;
        let d = decomposition(space, u1.clone(), b.clone(), p)?;
        if d.norm_aggregate <= target {
            return Ok(d);
        }
        let (j, g1, g2) = objective(space, &u1, &b, p)?;
        let grad = &g1 + &g2;
        if grad.max_abs() == 0.0 {
            return Err(no_convergence(iter, d.norm_aggregate - target));
        }
        let mut t = step * 2.0;
        loop {
            let cand = Vector::from(b.iter().zip(grad.iter()).zip(lo.iter()).map(|((bi, gi), li)| (bi - t * gi).max(*li)).collect::<Vec<_>>());
            let (jc, _, _) = objective(space, &(v + &cand), &cand, p)?;
            if jc < j {
                b = cand;
                step = t;
                break;
            }
            t *= 0.5;
            if t < 1e-16 {
                return Err(no_convergence(iter, d.norm_aggregate - target));
            }
        }
    }
    let d = decomposition(space, v + &b, b.clone(), p)?;
    Err(no_convergence(cfg.max_iters, d.norm_aggregate - target))
}

/// Ray cones: `u₁ = Ga`, `u₂ = Gb` with a quadratic penalty on `G(a − b) − v`.
fn gradient_rays(space: &SpaceSpec, v: &Vector, p: Exponent, target: f64, cfg: &DecompConfig) -> Result<Decomposition> {
    let gens = space.cone.generators().expect("polyhedral cone");
    let k = gens.len();
    let scale = v.max_abs().max(1.0);
    // feasible start: min Σ(a + b) subject to G(a − b) = v
    let mut b = Builder::default();
    let a0 = b.alloc(2 * k);
    for i in 0..space.dim {
        let entries: Vec<(usize, f64)> = (0..k).flat_map(|j| [(a0 + j, gens[j][i]), (a0 + k + j, -gens[j][i])]).collect();
        let row = b.row(&entries);
        b.eq.push((row, v[i]));
    }
    let all: Vec<(usize, f64)> = (0..2 * k).map(|c| (c, 1.0)).collect();
    let mut y = match b.solve_min(&all)? {
        LpOutcome::Optimal { argument, .. } => argument.into_inner(),
        _ => return Err(Error::input("vector is not in the span of the cone")),
    };
    let parts = |y: &[f64]| (combine(&gens, &y[..k]), combine(&gens, &y[k..]));
    let penalised = |y: &[f64], mu: f64| -> Result<(f64, Vec<f64>, f64)> {
        let (u1, u2) = parts(y);
        let r = &(&u1 - &u2) - v;
        let (j, g1, g2) = objective(space, &u1, &u2, p)?;
        let gr = r.scale(2.0 * mu);
        let mut grad = vec![0.0; 2 * k];
        for (jx, g) in gens.iter().enumerate() {
            grad[jx] = g.dot(&(&g1 + &gr));
            grad[k + jx] = g.dot(&(&g2 - &gr));
        }
        Ok((j + mu * r.dot(&r), grad, r.max_abs()))
    };
    let mut mu = 1.0;
    let mut step = 1.0;
    let mut last_gap = f64::INFINITY;
    for iter in 0..cfg.max_iters {
        if iter > 0 && iter % cfg.penalty_doubling == 0 {
            mu *= 2.0;
        }
        let (u1, _) = parts(&y);
        let u2 = &u1 - v;
        let (j, grad, resid) = penalised(&y, mu)?;
        if resid <= 1e-9 * scale && cone_contains(&space.cone, &u2, 1e-9 * scale)? {
            let d = decomposition(space, u1, u2, p)?;
            last_gap = d.norm_aggregate - target;
            if last_gap <= 0.0 {
                return Ok(d);
            }
        }
        let mut t = step * 2.0;
        loop {
            let cand: Vec<f64> = y.iter().zip(&grad).map(|(yi, gi)| (yi - t * gi).max(0.0)).collect();
            if penalised(&cand, mu)?.0 < j {
                y = cand;
                step = t;
                break;
            }
            t *= 0.5;
            if t < 1e-16 {
                break;
            }
        }
    }
    Err(no_convergence(cfg.max_iters, last_gap))
}

/// A decomposition `v = u₁ − u₂` with `u₁, u₂ ∈ V⁺` and aggregate within
/// `epsilon` of `‖v‖`.
pub fn opt_decompose(space: &SpaceSpec, v: &Vector, p: Exponent, epsilon: f64) -> Result<Decomposition> {
    opt_decompose_with(space, v, p, &DecompConfig { epsilon, ..Default::default() })
}

pub fn opt_decompose_with(space: &SpaceSpec, v: &Vector, p: Exponent, cfg: &DecompConfig) -> Result<Decomposition> {
    if !(cfg.epsilon > 0.0) {
        return Err(Error::input("epsilon must be positive"));
    }
    if v.dim() != space.dim {
        return Err(Error::input(format!("vector has dimension {} but the space has dimension {}", v.dim(), space.dim)));
    }
    if cone_contains(&space.cone, v, DEFAULT_TOL)? {
        return decomposition(space, v.clone(), Vector::zeros(v.dim()), p);
    }
    let target = norm(space, v)? + cfg.epsilon;
    match &space.cone.kind {
        ConeKind::Psd { .. } => {
            let (u1, u2) = psd_parts(space, v)?;
            let d = decomposition(space, u1, u2, p)?;
            if d.norm_aggregate > target {
                return Err(no_convergence(0, d.norm_aggregate - target));
            }
            Ok(d)
        }
        _ if space.is_polyhedral() && (p == Exponent::ONE || p.is_infinite()) => decompose_lp(space, v, p),
        ConeKind::NonnegOrthant => gradient_orthant(space, v, p, target, cfg),
        ConeKind::Rays(_) => gradient_rays(space, v, p, target, cfg),
    }
}

fn verdict_from_pair(space: &SpaceSpec, u1: &Vector, u2: &Vector) -> Result<OrthoVerdict> {
    if u1.is_zero(0.0) || u2.is_zero(0.0) {
        return Ok(OrthoVerdict { verdict: Verdict::Orthogonal, worst_residual: 0.0, witness_k: 0.0, k_grid: vec![0.0] });
    }
    if !space.p_class.is_infinite() {
        return p_orthogonal_numeric(space, u1, u2, Exponent::Infinity, &OrthoConfig::default());
    }
    let check = infty_positive_check(space, u1, u2, 1e-9)?;
    let k = norm(space, u1)? / norm(space, u2)?;
    Ok(OrthoVerdict {
        verdict: if check.orthogonal { Verdict::Orthogonal } else { Verdict::NotOrthogonal },
        worst_residual: (check.sum_norm - 1.0).abs(),
        witness_k: k,
        k_grid: vec![k],
    })
}

/// `v = v₁ − v₂` with `v₁ ⊥_∞ v₂`: positive and negative parts for
/// coordinate cones, spectral parts for PSD families.
pub fn infty_orth_decompose(space: &SpaceSpec, v: &Vector) -> Result<Decomposition> {
    if v.dim() != space.dim {
        return Err(Error::input(format!("vector has dimension {} but the space has dimension {}", v.dim(), space.dim)));
    }
    let (u1, u2) = match (&space.norm, &space.cone.kind) {
        (_, ConeKind::NonnegOrthant) => coordinate_parts(v),
        (NormKind::Spectral | NormKind::OrderUnit { .. }, ConeKind::Psd { .. }) => psd_parts(space, v)?,
        _ => return Err(Error::unsupported(format!("no ∞-orthogonal decomposition rule for {}", space.describe()))),
    };
    let mut d = decomposition(space, u1, u2, Exponent::Infinity)?;
    d.ortho_verdict = Some(verdict_from_pair(space, &d.u1, &d.u2)?);
    Ok(d)
}

/// `(v, f(v))` with `‖v‖ = 1` and `f(v) = ‖f‖′`.
fn norming_vector(space: &SpaceSpec, f: &Functional) -> Result<Vector> {
    let n = space.dim;
    match &space.norm {
        NormKind::Spectral => {
            let d = eigen_sym(&as_symmetric(f)?)?;
            Ok(d.apply(|l| l.signum() * (l != 0.0) as u8 as f64).to_flat())
        }
        NormKind::OrderUnit { e } if space.cone.is_psd() => {
            let (half, _) = sqrt_pair(&as_symmetric(e)?)?;
            let s = eigen_sym(&congruence(&half, &as_symmetric(f)?))?.apply(|l| l.signum() * (l != 0.0) as u8 as f64);
            Ok(congruence(&half, &s).to_flat())
        }
        _ => {
            let ball = unit_ball(space)?;
            let mut obj = vec![0.0; ball.width()];
            obj[..n].copy_from_slice(f);
            let (_, arg) = solve_lp(&ball.problem(Vector::from(obj), 0))?.into_optimal("norming vector")?;
            Ok(Vector::from(arg.as_slice()[..n].to_vec()))
        }
    }
}

/// `f = f₁ − f₂` with `f₁, f₂` in the dual cone minimising the `q`-aggregate
/// of their dual norms: lattice parts on the orthant, spectral parts after the
/// family's congruence on PSD cones, and an LP for ray cones.
pub fn dual_positive_decompose(space: &SpaceSpec, f: &Functional, q: Exponent) -> Result<Decomposition> {
    if f.dim() != space.dim {
        return Err(Error::input(format!("functional has dimension {} but the space has dimension {}", f.dim(), space.dim)));
    }
    let n = space.dim;
    let (f1, f2) = match (&space.norm, &space.cone.kind) {
        (_, ConeKind::NonnegOrthant) => coordinate_parts(f),
        (NormKind::Spectral, ConeKind::Psd { .. }) => {
            let (a, b) = spectral_parts(&as_symmetric(f)?)?;
            (a.to_flat(), b.to_flat())
        }
        (NormKind::OrderUnit { e: m } | NormKind::Base { phi: m }, ConeKind::Psd { .. }) => {
            // order unit: dual norm is the trace norm of E^{1/2} F E^{1/2};
            // base: the operator norm of Φ^{-1/2} F Φ^{-1/2}
            let (half, inv_half) = sqrt_pair(&as_symmetric(m)?)?;
            let (inner, outer) = if matches!(space.norm, NormKind::OrderUnit { .. }) { (half, inv_half) } else { (inv_half, half) };
            let (a, b) = spectral_parts(&congruence(&inner, &as_symmetric(f)?))?;
            (congruence(&outer, &a).to_flat(), congruence(&outer, &b).to_flat())
        }
        (_, ConeKind::Rays(gens)) if space.is_polyhedral() => {
            let ball = dual_unit_ball(space)?;
            let mut b = Builder::default();
            let c1 = b.alloc_free(n);
            let c2 = b.alloc_free(n);
            let x = |c: usize| -> Vec<Vec<(usize, f64)>> { (0..n).map(|i| vec![(c + i, 1.0)]).collect() };
            let t1 = b.alloc(1);
            let t2 = b.alloc(1);
            b.scaled_ball(&ball, &x(c1), t1);
            b.scaled_ball(&ball, &x(c2), t2);
            for i in 0..n {
                let row = b.row(&[(c1 + i, 1.0), (c2 + i, -1.0)]);
                b.eq.push((row, f[i]));
            }
            for g in gens {
                for c in [c1, c2] {
                    let entries: Vec<(usize, f64)> = (0..n).map(|i| (c + i, -g[i])).collect();
                    let row = b.row(&entries);
                    b.le.push((row, 0.0));
                }
            }
            let arg = match q {
                Exponent::Finite(q) if q == 1.0 => b.solve_min(&[(t1, 1.0), (t2, 1.0)])?.into_optimal("dual decomposition")?.1,
                Exponent::Infinity => {
                    let s = b.alloc(1);
                    for t in [t1, t2] {
                        let row = b.row(&[(t, 1.0), (s, -1.0)]);
                        b.le.push((row, 0.0));
                    }
                    let s_star = b.solve_min(&[(s, 1.0)])?.into_optimal("dual decomposition")?.1[s];
                    let row = b.row(&[(s, 1.0)]);
                    b.le.push((row, s_star + 1e-10 * s_star.max(1.0)));
                    b.solve_min(&[(t1, 1.0), (t2, 1.0)])?.into_optimal("dual decomposition tie-break")?.1
                }
                Exponent::Finite(_) => return Err(Error::unsupported(format!("dual decomposition for q = {q} on {}", space.describe()))),
            };
            let f1 = clean(Vector::from(arg.as_slice()[c1..c1 + n].to_vec()));
            let f2 = clean(&f1 - f);
            (f1, f2)
        }
        _ => return Err(Error::unsupported(format!("no dual decomposition rule for {}", space.describe()))),
    };
    let norm_aggregate = q.aggregate(dual_norm(space, &f1)?, dual_norm(space, &f2)?);
    Ok(Decomposition { u1: f1, u2: f2, p: q, norm_aggregate, ortho_verdict: None })
}

/// `f = f₁ − f₂` with `f₁, f₂` in the dual cone and `‖f‖′ = ‖f₁‖′ + ‖f₂‖′`,
/// verified to be 1-orthogonal in the dual norm.
pub fn dual_one_orth_decompose(space: &SpaceSpec, f: &Functional) -> Result<Decomposition> {
    if !space.p_class.is_infinite() {
        return Err(Error::input("dual decomposition needs a space of class p = ∞"));
    }
    if !matches!(space.cone.kind, ConeKind::NonnegOrthant) && !matches!(space.norm, NormKind::Spectral | NormKind::OrderUnit { .. }) {
        return Err(Error::unsupported(format!("no dual decomposition rule for {}", space.describe())));
    }
    let Decomposition { u1: f1, u2: f2, .. } = dual_positive_decompose(space, f, Exponent::ONE)?;

    let nf = dual_norm(space, f)?;
    let (n1, n2) = (dual_norm(space, &f1)?, dual_norm(space, &f2)?);
    let scale = nf.max(1.0);
    if (n1 + n2 - nf).abs() > 1e-8 * scale {
        return Err(Error::Numerical(format!("dual norms not additive: {n1} + {n2} vs {nf}")));
    }
    let verdict = if f1.is_zero(0.0) || f2.is_zero(0.0) {
        OrthoVerdict { verdict: Verdict::Orthogonal, worst_residual: 0.0, witness_k: 0.0, k_grid: vec![0.0] }
    } else {
        p_orthogonal_by(|g| dual_norm(space, g), &f1, &f2, Exponent::ONE, &OrthoConfig::default())?
    };
    // a norming v = v₁ − v₂ with max(‖v₁‖, ‖v₂‖) ≤ 1 forces f₁(v₂) = f₂(v₁) = 0
    if nf > 0.0 {
        let v = norming_vector(space, f)?;
        let split = opt_decompose(space, &v, Exponent::Infinity, 1e-9)?;
        let cross = f1.dot(&split.u2).abs().max(f2.dot(&split.u1).abs());
        if cross > 1e-8 * scale {
            return Err(Error::Numerical(format!("cross terms f1(v2), f2(v1) do not vanish: {cross:e}")));
        }
    }
    Ok(Decomposition { u1: f1, u2: f2, p: Exponent::ONE, norm_aggregate: n1 + n2, ortho_verdict: Some(verdict) })
}

/// Coordinates with respect to a verified orthonormal set.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingMap {
    pub basis: Vec<Vector>,
    pub p: Exponent,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingCheck {
    pub samples: usize,
    /// Largest `|‖Σ α_u u‖ − ‖α‖_p|` relative to `max(1, ‖α‖_p)`.
    pub max_norm_error: f64,
    /// Samples where cone membership disagreed with the signs of `α`; only
    /// counted when every basis element is positive.
    pub order_mismatches: usize,
}

impl EmbeddingMap {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn coefficients(&self, x: &Vector) -> Result<Vector> {
        let (alpha, resid) = least_squares(&self.basis, x)?;
        if resid > 1e-9 * x.max_abs().max(1.0) {
            return Err(Error::input(format!("vector is not in the span of the set (residual {resid:e})")));
        }
        Ok(Vector::from(alpha))
    }

    pub fn embed(&self, alpha: &[f64]) -> Result<Vector> {
        if alpha.len() != self.basis.len() {
            return Err(Error::input(format!("expected {} coefficients, got {}", self.basis.len(), alpha.len())));
        }
        Ok(combine(&self.basis, alpha))
    }

    /// Samples coefficient vectors and compares norms with the ℓ_p norm.
    pub fn check(&self, space: &SpaceSpec, samples: usize, seed: u64) -> Result<EmbeddingCheck> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positive_basis = self.basis.iter().map(|u| cone_contains(&space.cone, u, DEFAULT_TOL)).collect::<Result<Vec<_>>>()?.into_iter().all(|b| b);
        let mut max_norm_error: f64 = 0.0;
        let mut order_mismatches = 0;
        for s in 0..samples {
            let alpha: Vec<f64> = (0..self.rank())
                .map(|_| {
                    let a: f64 = rng.gen_range(0.0..2.0);
                    // every other sample keeps all coefficients nonnegative
                    if s % 2 == 1 && rng.gen_bool(0.5) { -a } else { a }
                })
                .collect();
            let x = self.embed(&alpha)?;
            let target = self.p.lp_norm(&alpha);
            max_norm_error = max_norm_error.max((norm(space, &x)? - target).abs() / target.max(1.0));
            if positive_basis {
                let nonneg = alpha.iter().all(|&a| a >= 0.0);
                let clearly_negative = alpha.iter().any(|&a| a < -1e-6);
                let inside = cone_contains(&space.cone, &x, DEFAULT_TOL)?;
                if (nonneg && !inside) || (clearly_negative && inside) {
                    order_mismatches += 1;
                }
            }
        }
        Ok(EmbeddingCheck { samples, max_norm_error, order_mismatches })
    }
}

/// The coordinate map onto `ℓ_p^{|U|}` for an orthonormal set `U`.
pub fn embed_to_lp(space: &SpaceSpec, set: &[Vector], p: Exponent, cfg: &OrthoConfig) -> Result<EmbeddingMap> {
    let report = orthonormal_set_verify(space, set, p, cfg)?;
    if !report.passed() {
        let detail = match &report.failing_pair {
            Some((i, j, v)) => format!("elements {i} and {j} are not {p}-orthogonal (residual {:e} at k = {})", v.worst_residual, v.witness_k),
            None if !report.unit_norms_ok => "elements do not all have norm one".to_string(),
            None => "additivity spot check failed".to_string(),
        };
        return Err(Error::input(format!("set is not orthonormal: {detail}")));
    }
    Ok(EmbeddingMap { basis: set.to_vec(), p })
}
