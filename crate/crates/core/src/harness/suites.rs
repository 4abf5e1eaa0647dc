//! One sampled instance per call for every suite.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::sample::*;
use super::Counterexample;
use crate::cones::{as_symmetric, cone_contains, dual_cone_contains, order_le, pairing, ConeKind};
use crate::decomp::{dual_one_orth_decompose, dual_positive_decompose, embed_to_lp, infty_orth_decompose, opt_decompose};
use crate::error::{Error, Result};
use crate::linalg::{eigen_sym, Vector};
use crate::ortho::{infty_positive_check, orthonormal_set_verify, p_orthogonal_by, p_orthogonal_exact, p_orthogonal_numeric, OrthoConfig, Verdict};
use crate::spaces::{congruence, dual_norm, norm, restricted_norm_lp, Exponent, NormKind, RestrictedNorm, SpaceSpec};
use crate::support::{crust_probe, positive_support};

pub(crate) enum Outcome {
    Pass,
    Fail(Counterexample),
}

pub(crate) struct Ctx<'a> {
    pub space: &'a SpaceSpec,
    pub tol: f64,
    pub cfg: OrthoConfig,
    pub metrics: BTreeMap<String, f64>,
}

impl Ctx<'_> {
    fn bump(&mut self, key: &str) {
        *self.metrics.entry(key.to_string()).or_insert(0.0) += 1.0;
    }

    fn touch(&mut self, key: &str) {
        self.metrics.entry(key.to_string()).or_insert(0.0);
    }

    fn record_max(&mut self, key: &str, value: f64) {
        let slot = self.metrics.entry(key.to_string()).or_insert(0.0);
        *slot = slot.max(value);
    }

    fn p(&self) -> Exponent {
        self.space.p_class
    }

    fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.tol * b.abs().max(1.0)
    }
}

fn fail(input: Value, residual: f64, location: &str) -> Outcome {
    Outcome::Fail(Counterexample { input, residual: Some(residual), location: location.to_string() })
}

fn missing(what: &str) -> Error {
    Error::unsupported(format!("no {what} generator for this family"))
}

fn combine(set: &[Vector], alpha: &[f64]) -> Vector {
    let mut x = Vector::zeros(set[0].dim());
    for (u, a) in set.iter().zip(alpha) {
        x = x.axpy(*a, u);
    }
    x
}

/// Coefficients with exact zeros; negative entries only when `mixed`.
fn coeffs(rng: &mut ChaCha8Rng, m: usize, mixed: bool) -> Vec<f64> {
    (0..m)
        .map(|_| {
            if rng.gen_bool(0.15) {
                0.0
            } else {
                let a = 0.05 + exp(rng);
                if mixed && rng.gen_bool(0.4) { -a } else { a }
            }
        })
        .collect()
}

fn log_scale(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-2.0..2.0))
}

fn positive_sample(space: &SpaceSpec, rng: &mut ChaCha8Rng) -> Vector {
    let u = if rng.gen_bool(0.5) { sample_cone_with(space, rng) } else { sample_face(space, rng) };
    u.scale(log_scale(rng))
}

fn is_coordinate_oracle_family(space: &SpaceSpec) -> bool {
    matches!(space.cone.kind, ConeKind::NonnegOrthant) && matches!(space.norm, NormKind::Lp { weights: None, .. } | NormKind::Sup)
}

/// Orthogonal reads as `true`; inconclusive verdicts count as `false`.
fn orthogonal(space: &SpaceSpec, x: &Vector, y: &Vector, p: Exponent, cfg: &OrthoConfig) -> Result<bool> {
    if is_coordinate_oracle_family(space) {
        return p_orthogonal_exact(x, y, p);
    }
    Ok(p_orthogonal_numeric(space, x, y, p, cfg)?.verdict == Verdict::Orthogonal)
}

/// Norm on `W′` of functionals given by their values on `(u₁, u₂)`.
fn restricted_dual<'a>(space: &'a SpaceSpec, u1: &Vector, u2: &Vector) -> Result<Box<dyn Fn(&Vector) -> Result<f64> + 'a>> {
    if space.is_polyhedral() {
        let (a, b) = (u1.clone(), u2.clone());
        Ok(Box::new(move |g: &Vector| restricted_norm_lp(space, (&a, &b), (g[0], g[1]))))
    } else {
        let rn = RestrictedNorm::new(space, u1, u2)?;
        Ok(Box::new(move |g: &Vector| rn.dual_norm((g[0], g[1]))))
    }
}

/// `(f(u₁), f(u₂))`
fn restrict(f: &Vector, u1: &Vector, u2: &Vector) -> Vector {
    Vector::from(vec![pairing(f, u1), pairing(f, u2)])
}

/// A positive support with as few active generators as the family allows.
/// Base norms on the orthant admit `φ` masked to the support of `u`.
pub(crate) fn sparse_positive_support(space: &SpaceSpec, u: &Vector) -> Result<Vector> {
    if let (ConeKind::NonnegOrthant, NormKind::Base { phi }) = (&space.cone.kind, &space.norm) {
        let scale = u.max_abs();
        return Ok(Vector::from(phi.iter().zip(u.iter()).map(|(p, x)| if *x > 1e-13 * scale { *p } else { 0.0 }).collect::<Vec<_>>()));
    }
    Ok(positive_support(space, u)?.functional)
}

/// The three statements of the ∞-orthogonality characterisation for a
/// positive pair: normalised sum of norm one, ⊥∞ on the grid, and vanishing
/// cross terms with `g₁ ⊥₁ g₂` on the span.
pub fn thm33_statements(space: &SpaceSpec, u1: &Vector, u2: &Vector, tol: f64) -> Result<[bool; 3]> {
    let cfg = OrthoConfig::with_tol(tol);
    let s1 = infty_positive_check(space, u1, u2, tol)?.orthogonal;
    let s2 = p_orthogonal_numeric(space, u1, u2, Exponent::Infinity, &cfg)?.verdict == Verdict::Orthogonal;
    let f1 = positive_support(space, u1)?.functional;
    let f2 = positive_support(space, u2)?.functional;
    let cross = pairing(&f1, u2).abs() <= tol * norm(space, u2)?.max(1.0) && pairing(&f2, u1).abs() <= tol * norm(space, u1)?.max(1.0);
    let s3 = cross && {
        let rn = restricted_dual(space, u1, u2)?;
        p_orthogonal_by(|g| rn(g), &restrict(&f1, u1, u2), &restrict(&f2, u1, u2), Exponent::ONE, &cfg)?.verdict == Verdict::Orthogonal
    };
    Ok([s1, s2, s3])
}

pub(crate) fn thm21(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let set = signed_orthonormal_set(space, rng, 8)?.ok_or_else(|| missing("orthonormal set"))?;
    let report = orthonormal_set_verify(space, &set, ctx.p(), &ctx.cfg)?;
    if !report.passed() {
        let residual = report.failing_pair.as_ref().map_or(0.0, |f| f.2.worst_residual);
        return Ok(fail(json!({ "set": set }), residual, "orthonormal set rejected"));
    }
    let alpha = coeffs(rng, set.len(), true);
    let x = combine(&set, &alpha);
    let (lhs, rhs) = (norm(space, &x)?, ctx.p().lp_norm(&alpha));
    if !ctx.close(lhs, rhs) {
        return Ok(fail(json!({ "set": set, "alpha": alpha }), lhs - rhs, "span is not isometric to lp"));
    }
    if set.len() >= 3 {
        let y = combine(&set[1..], &coeffs(rng, set.len() - 1, true));
        let z = combine(&set[1..], &coeffs(rng, set.len() - 1, true));
        if !y.is_zero(0.0) && !(&y + &z).is_zero(0.0) {
            let v = p_orthogonal_numeric(space, &set[0], &(&y + &z), ctx.p(), &ctx.cfg)?;
            if !v.is_orthogonal() {
                return Ok(fail(json!({ "x": set[0], "y": y, "z": z }), v.worst_residual, "orthogonality not additive"));
            }
        }
    }
    Ok(Outcome::Pass)
}

pub(crate) fn def22_op1(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let a = positive_sample(space, rng);
    let b = positive_sample(space, rng);
    let v = sample_vector(space, rng).scale(log_scale(rng));
    let lhs = norm(space, &v)?;
    let rhs = ctx.p().aggregate(norm(space, &(&v - &a))?, norm(space, &(&v + &b))?);
    if lhs > rhs + ctx.tol * rhs.max(1.0) {
        return Ok(fail(json!({ "a": a, "b": b, "v": v }), lhs - rhs, "norm exceeds aggregate of interval ends"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn def22_op2(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let v = match rng.gen_range(0..5) {
        0 => positive_sample(space, rng),
        1 => positive_sample(space, rng).scale(-1.0),
        _ => sample_vector(space, rng).scale(log_scale(rng)),
    };
    let nv = norm(space, &v)?;
    let eps = ctx.tol.max(1e-9) * nv.max(1.0);
    let d = opt_decompose(space, &v, ctx.p(), eps)?;
    let input = || json!({ "v": v, "u1": d.u1, "u2": d.u2 });
    if !cone_contains(&space.cone, &d.u1, ctx.tol)? || !cone_contains(&space.cone, &d.u2, ctx.tol)? {
        return Ok(fail(input(), 0.0, "part outside the cone"));
    }
    let recon = (&(&d.u1 - &d.u2) - &v).max_abs();
    if recon > 1e-9 * v.max_abs().max(1.0) {
        return Ok(fail(input(), recon, "parts do not reconstruct v"));
    }
    if d.norm_aggregate > nv + eps + ctx.tol * nv.max(1.0) {
        return Ok(fail(input(), d.norm_aggregate - nv, "aggregate above the norm plus epsilon"));
    }
    if d.norm_aggregate < nv - 1e-9 * nv.max(1.0) {
        return Ok(fail(input(), nv - d.norm_aggregate, "aggregate below the norm"));
    }
    Ok(Outcome::Pass)
}

fn dual_sample(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vector {
    sample_vector(ctx.space, rng).scale(log_scale(rng))
}

pub(crate) fn thm23(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let q = ctx.p().conjugate();
    let f = dual_sample(ctx, rng);
    let a = sample_dual_cone(space, rng)?.scale(log_scale(rng));
    let b = sample_dual_cone(space, rng)?.scale(log_scale(rng));
    let lhs = dual_norm(space, &f)?;
    let rhs = q.aggregate(dual_norm(space, &(&f - &a))?, dual_norm(space, &(&f + &b))?);
    if lhs > rhs + ctx.tol * rhs.max(1.0) {
        return Ok(fail(json!({ "f": f, "a": a, "b": b }), lhs - rhs, "dual norm exceeds aggregate of interval ends"));
    }
    let d = dual_positive_decompose(space, &f, q)?;
    let input = || json!({ "f": f, "f1": d.u1, "f2": d.u2 });
    if !dual_cone_contains(&space.cone, &d.u1, ctx.tol)? || !dual_cone_contains(&space.cone, &d.u2, ctx.tol)? {
        return Ok(fail(input(), 0.0, "dual part outside the dual cone"));
    }
    let recon = (&(&d.u1 - &d.u2) - &f).max_abs();
    if recon > 1e-9 * f.max_abs().max(1.0) {
        return Ok(fail(input(), recon, "dual parts do not reconstruct f"));
    }
    if d.norm_aggregate > lhs + ctx.tol * lhs.max(1.0) {
        return Ok(fail(input(), d.norm_aggregate - lhs, "dual aggregate above the dual norm"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn thm24(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let q = ctx.p().conjugate();
    let f = if rng.gen_bool(0.2) { sample_dual_cone(space, rng)? } else { dual_sample(ctx, rng) };
    let nf = dual_norm(space, &f)?;
    let d = dual_positive_decompose(space, &f, q)?;
    let input = || json!({ "f": f, "f1": d.u1, "f2": d.u2 });
    if !dual_cone_contains(&space.cone, &d.u1, ctx.tol)? || !dual_cone_contains(&space.cone, &d.u2, ctx.tol)? {
        return Ok(fail(input(), 0.0, "dual part outside the dual cone"));
    }
    if (&(&d.u1 - &d.u2) - &f).max_abs() > 1e-9 * f.max_abs().max(1.0) {
        return Ok(fail(input(), 0.0, "dual parts do not reconstruct f"));
    }
    if !ctx.close(d.norm_aggregate, nf) {
        return Ok(fail(input(), d.norm_aggregate - nf, "dual aggregate differs from the dual norm"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn prop25(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let p = ctx.p();
    let set = positive_orthonormal_set(space, rng, 8)?.ok_or_else(|| missing("orthonormal set"))?;
    let m = set.len();
    let alpha = coeffs(rng, m, true);
    let a = coeffs(rng, m, false);
    let b = coeffs(rng, m, false);
    let v = combine(&set, &alpha);
    let lower: Vec<f64> = alpha.iter().zip(&a).map(|(x, y)| x - y).collect();
    let upper: Vec<f64> = alpha.iter().zip(&b).map(|(x, y)| x + y).collect();
    let nv = norm(space, &v)?;
    let rhs = p.aggregate(norm(space, &combine(&set, &lower))?, norm(space, &combine(&set, &upper))?);
    let input = || json!({ "set": set, "alpha": alpha, "a": a, "b": b });
    if nv > rhs + ctx.tol * rhs.max(1.0) {
        return Ok(fail(input(), nv - rhs, "span violates the interval condition"));
    }
    let plus: Vec<f64> = alpha.iter().map(|x| x.max(0.0)).collect();
    let minus: Vec<f64> = alpha.iter().map(|x| (-x).max(0.0)).collect();
    let agg = p.aggregate(norm(space, &combine(&set, &plus))?, norm(space, &combine(&set, &minus))?);
    if agg > nv + ctx.tol * nv.max(1.0) {
        return Ok(fail(input(), agg - nv, "span coefficient split above the norm"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn embedding(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let p = ctx.p();
    let set = positive_orthonormal_set(space, rng, 8)?.ok_or_else(|| missing("orthonormal set"))?;
    let map = match embed_to_lp(space, &set, p, &ctx.cfg) {
        Ok(m) => m,
        Err(e) => return Ok(fail(json!({ "set": set }), 0.0, &format!("embedding rejected: {e}"))),
    };
    for _ in 0..2 {
        let mixed = rng.gen_bool(0.7);
        let alpha = coeffs(rng, set.len(), mixed);
        let x = map.embed(&alpha)?;
        let err = (norm(space, &x)? - p.lp_norm(&alpha)).abs();
        ctx.record_max("max_norm_error", err);
        let input = || json!({ "set": set, "alpha": alpha });
        if err > ctx.tol * p.lp_norm(&alpha).max(1.0) {
            return Ok(fail(input(), err, "embedding is not isometric"));
        }
        let back = map.coefficients(&x)?;
        let drift = back.iter().zip(&alpha).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if drift > 1e-9 * x.max_abs().max(1.0) {
            return Ok(fail(input(), drift, "coefficients do not round trip"));
        }
        if cone_contains(&space.cone, &x, ctx.tol)? != alpha.iter().all(|a| *a >= 0.0) {
            return Ok(fail(input(), 0.0, "order is not preserved"));
        }
    }
    Ok(Outcome::Pass)
}

/// Orthogonal positive pairs never differ by a positive element.
pub(crate) fn positive_pair_difference(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let (u1, u2) = orthogonal_pair(space, rng)?.ok_or_else(|| missing("orthogonal pair"))?;
    let (u1, u2) = if rng.gen_bool(0.5) { (u1, u2) } else { (u2, u1) };
    if !orthogonal(space, &u1, &u2, ctx.p(), &ctx.cfg)? {
        return Ok(fail(json!({ "u1": u1, "u2": u2 }), 0.0, "generated pair is not orthogonal"));
    }
    if cone_contains(&space.cone, &(&u1 - &u2), ctx.tol)? {
        return Ok(fail(json!({ "u1": u1, "u2": u2 }), u2.max_abs(), "difference of an orthogonal pair is positive"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn lem28(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let set = positive_orthonormal_set(space, rng, 8)?.ok_or_else(|| missing("orthonormal set"))?;
    let mixed = rng.gen_bool(0.7);
    let alpha = coeffs(rng, set.len(), mixed);
    let x = combine(&set, &alpha);
    let inside = cone_contains(&space.cone, &x, ctx.tol)?;
    if inside != alpha.iter().all(|a| *a >= -1e-9) {
        return Ok(fail(json!({ "set": set, "alpha": alpha, "in_cone": inside }), 0.0, "cone membership disagrees with coefficient signs"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn prop32(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let u = positive_sample(space, rng);
    let f = positive_support(space, &u)?.functional;
    let (nf, fu, nu) = (dual_norm(space, &f)?, pairing(&f, &u), norm(space, &u)?);
    let input = || json!({ "u": u, "f": f });
    if (nf - 1.0).abs() > ctx.tol {
        return Ok(fail(input(), nf - 1.0, "support functional is not norm one"));
    }
    if !ctx.close(fu, nu) {
        return Ok(fail(input(), fu - nu, "support functional does not attain the norm"));
    }
    if !dual_cone_contains(&space.cone, &f, ctx.tol)? {
        return Ok(fail(input(), 0.0, "support functional is not positive"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn thm33(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (u1, u2) = positive_pair(ctx.space, rng)?;
    let s = thm33_statements(ctx.space, &u1, &u2, ctx.tol)?;
    if s[0] {
        ctx.bump("orthogonal_pairs");
    }
    if !(s[0] == s[1] && s[1] == s[2]) {
        return Ok(fail(json!({ "u1": u1, "u2": u2, "statements": s }), 0.0, "statements disagree"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn rem34(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let (u1, u2) = orthogonal_pair(space, rng)?.ok_or_else(|| missing("orthogonal pair"))?;
    if !infty_positive_check(space, &u1, &u2, ctx.tol)?.orthogonal {
        return Ok(fail(json!({ "u1": u1, "u2": u2 }), 0.0, "generated pair is not orthogonal"));
    }
    let f1 = positive_support(space, &u1)?.functional;
    let f2 = positive_support(space, &u2)?.functional;
    for _ in 0..3 {
        let (a1, a2) = (gauss(rng), gauss(rng));
        let n = dual_norm(space, &f1.scale(a1).axpy(a2, &f2))?;
        let want = a1.abs() + a2.abs();
        if (n - want).abs() > 1e-8 * want.max(1.0) {
            return Ok(fail(json!({ "u1": u1, "u2": u2, "f1": f1, "f2": f2, "alpha": [a1, a2] }), n - want, "extension is not norm preserving"));
        }
    }
    Ok(Outcome::Pass)
}

fn unit_element(space: &SpaceSpec) -> Result<Vector> {
    space.order_unit_element().ok_or_else(|| Error::unsupported("family has no order unit"))
}

pub(crate) fn cor38(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let e = unit_element(space)?;
    let (u1, u2) = positive_pair(space, rng)?;
    let ortho = p_orthogonal_numeric(space, &u1, &u2, Exponent::Infinity, &ctx.cfg)?.verdict == Verdict::Orthogonal;
    let hat_sum = u1.scale(1.0 / norm(space, &u1)?).axpy(1.0 / norm(space, &u2)?, &u2);
    let below = order_le(&space.cone, &hat_sum, &e, ctx.tol)?;
    if ortho {
        ctx.bump("orthogonal_pairs");
    }
    if ortho != below {
        return Ok(fail(json!({ "u1": u1, "u2": u2, "orthogonal": ortho, "below_unit": below }), 0.0, "orthogonality disagrees with the unit bound"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn cor310(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let e = unit_element(space)?;
    let u = positive_sample(space, rng);
    let hat = u.scale(1.0 / norm(space, &u)?);
    let partner = &e - &hat;
    let has_partner = !partner.is_zero(1e-12) && order_le(&space.cone, &(&hat + &partner.scale(1.0 / norm(space, &partner)?)), &e, ctx.tol)?;
    let crust = crust_probe(space, &u)?;
    if has_partner {
        ctx.bump("with_partner");
    }
    let crust_exists = crust.is_some();
    let input = || json!({ "u": u, "partner_exists": has_partner, "crust_exists": crust_exists });
    if crust_exists != has_partner {
        return Ok(fail(input(), 0.0, "crust existence disagrees with partner existence"));
    }
    if let Some(c) = crust {
        let f = &c.support.functional;
        let nf = dual_norm(space, f)?;
        if !dual_cone_contains(&space.cone, f, ctx.tol)? || (nf - 1.0).abs() > ctx.tol || pairing(f, &u).abs() > ctx.tol * norm(space, &u)?.max(1.0) {
            return Ok(fail(input(), nf - 1.0, "crust is not a positive norm-one functional vanishing on u"));
        }
        if !c.partner_verified {
            return Ok(fail(input(), 0.0, "partner e - u failed the orthogonality test"));
        }
    }
    Ok(Outcome::Pass)
}

pub(crate) fn rem311(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let e = unit_element(space)?;
    let mut found = None;
    for _ in 0..10 {
        let u = sample_face(space, rng);
        if crust_probe(space, &u)?.is_some() {
            found = Some(u);
            break;
        }
    }
    ctx.touch("orthogonal_candidates");
    let Some(u) = found else { return Ok(Outcome::Pass) };
    let hat = u.scale(1.0 / norm(space, &u)?);
    let top = &e - &hat;
    for _ in 0..8 {
        let cand = match rng.gen_range(0..3) {
            0 => {
                // shrink the greatest partner inside its own face
                let r = face_direction(space, &top, rng)?;
                let r = r.scale(1.0 / norm(space, &r)?);
                let mut t = rng.gen_range(0.0..1.0);
                let mut v = top.axpy(-t, &r);
                for _ in 0..30 {
                    if cone_contains(&space.cone, &v, 0.0)? {
                        break;
                    }
                    t /= 2.0;
                    v = top.axpy(-t, &r);
                }
                v
            }
            1 => sample_face(space, rng),
            _ => sample_cone_with(space, rng),
        };
        if cand.is_zero(1e-12) || !cone_contains(&space.cone, &cand, 0.0)? {
            continue;
        }
        let v = cand.scale(1.0 / norm(space, &cand)?);
        if infty_positive_check(space, &u, &v, ctx.tol)?.orthogonal {
            ctx.bump("orthogonal_candidates");
            if !order_le(&space.cone, &v, &top, 1e-9)? {
                return Ok(fail(json!({ "u": u, "v": v }), 0.0, "orthogonal partner exceeds e - u"));
            }
            return Ok(Outcome::Pass);
        }
    }
    Ok(Outcome::Pass)
}

/// A random positive element of the face generated by `top`.
fn face_direction(space: &SpaceSpec, top: &Vector, rng: &mut ChaCha8Rng) -> Result<Vector> {
    Ok(match &space.cone.kind {
        ConeKind::NonnegOrthant => Vector::from(top.iter().map(|t| t * exp(rng)).collect::<Vec<_>>()),
        ConeKind::Psd { .. } => {
            let root = eigen_sym(&as_symmetric(top)?)?.apply(|l| l.max(0.0).sqrt());
            congruence(&root, &as_symmetric(&sample_cone_with(space, rng))?).to_flat()
        }
        ConeKind::Rays(_) => sample_cone_with(space, rng),
    })
}

fn one_class_pair(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<(Vector, Vector, Vector, Vector)> {
    let (u1, u2) = positive_pair(ctx.space, rng)?;
    let f1 = sparse_positive_support(ctx.space, &u1)?;
    let f2 = sparse_positive_support(ctx.space, &u2)?;
    Ok((u1, u2, f1, f2))
}

pub(crate) fn thm41(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let (u1, u2, f1, f2) = one_class_pair(ctx, rng)?;
    let cross = pairing(&f1, &u2).abs() <= ctx.tol * norm(space, &u2)?.max(1.0) && pairing(&f2, &u1).abs() <= ctx.tol * norm(space, &u1)?.max(1.0);
    let s1 = cross && p_orthogonal_numeric(space, &u1, &u2, Exponent::ONE, &ctx.cfg)?.verdict == Verdict::Orthogonal;
    let rn = restricted_dual(space, &u1, &u2)?;
    let s2 = p_orthogonal_by(|g| rn(g), &restrict(&f1, &u1, &u2), &restrict(&f2, &u1, &u2), Exponent::Infinity, &ctx.cfg)?.verdict == Verdict::Orthogonal;
    if s1 {
        ctx.bump("orthogonal_pairs");
    }
    if s1 != s2 {
        return Ok(fail(json!({ "u1": u1, "u2": u2, "f1": f1, "f2": f2, "statements": [s1, s2] }), 0.0, "statements disagree"));
    }
    Ok(Outcome::Pass)
}

/// Checked in the form the argument establishes: `‖f₁ + f₂‖′ = 1` (that is
/// `f₁ ⊥∞ f₂` for norm-one positive functionals) forces `g₁ ⊥∞ g₂`. The
/// literal ⊥₁ hypothesis and the converse are only counted.
pub(crate) fn rem42(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let (u1, u2, f1, f2) = one_class_pair(ctx, rng)?;
    let dn = |f: &Vector| dual_norm(space, f);
    let f_inf = p_orthogonal_by(dn, &f1, &f2, Exponent::Infinity, &ctx.cfg)?.verdict == Verdict::Orthogonal;
    let f_one = p_orthogonal_by(dn, &f1, &f2, Exponent::ONE, &ctx.cfg)?.verdict == Verdict::Orthogonal;
    let rn = restricted_dual(space, &u1, &u2)?;
    let (g1, g2) = (restrict(&f1, &u1, &u2), restrict(&f2, &u1, &u2));
    for key in ["hypothesis_infty", "hypothesis_one", "converse_cases"] {
        ctx.touch(key);
    }
    let g_inf = p_orthogonal_by(|g| rn(g), &g1, &g2, Exponent::Infinity, &ctx.cfg)?.verdict == Verdict::Orthogonal;
    let g_one = p_orthogonal_by(|g| rn(g), &g1, &g2, Exponent::ONE, &ctx.cfg)?.verdict == Verdict::Orthogonal;
    if f_inf {
        ctx.bump("hypothesis_infty");
    }
    if f_one {
        ctx.bump("hypothesis_one");
    }
    if g_inf && !f_inf {
        ctx.bump("converse_cases");
    }
    let input = || json!({ "u1": u1, "u2": u2, "f1": f1, "f2": f2 });
    if f_inf && !g_inf {
        return Ok(fail(input(), 0.0, "restriction lost infinity-orthogonality"));
    }
    if f_one && !g_one {
        return Ok(fail(input(), 0.0, "restriction lost 1-orthogonality"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn lem43(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let (u1, u2, f1, f2) = one_class_pair(ctx, rng)?;
    let cross = pairing(&f1, &u2).abs() <= ctx.tol * norm(space, &u2)?.max(1.0) && pairing(&f2, &u1).abs() <= ctx.tol * norm(space, &u1)?.max(1.0);
    ctx.touch("hypothesis_hits");
    if !cross {
        return Ok(Outcome::Pass);
    }
    ctx.bump("hypothesis_hits");
    let v = p_orthogonal_numeric(space, &u1, &u2, Exponent::ONE, &ctx.cfg)?;
    if !v.is_orthogonal() {
        return Ok(fail(json!({ "u1": u1, "u2": u2, "f1": f1, "f2": f2 }), v.worst_residual, "vanishing cross terms without 1-orthogonality"));
    }
    Ok(Outcome::Pass)
}

pub(crate) fn thm44(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let space = ctx.space;
    let v = sample_vector(space, rng).scale(log_scale(rng));
    match infty_orth_decompose(space, &v) {
        Ok(d) => {
            let ok = d.ortho_verdict.as_ref().map_or(true, |x| x.is_orthogonal());
            if !ok || (&(&d.u1 - &d.u2) - &v).max_abs() > 1e-9 * v.max_abs().max(1.0) {
                return Ok(fail(json!({ "v": v, "u1": d.u1, "u2": d.u2 }), 0.0, "infinity-orthogonal decomposition failed"));
            }
            ctx.bump("hypothesis_checked");
        }
        Err(Error::Unsupported(_)) => {}
        Err(e) => return Err(e),
    }
    let f = dual_sample(ctx, rng);
    let nf = dual_norm(space, &f)?;
    let d = dual_one_orth_decompose(space, &f)?;
    let input = || json!({ "f": f, "f1": d.u1, "f2": d.u2 });
    if !dual_cone_contains(&space.cone, &d.u1, ctx.tol)? || !dual_cone_contains(&space.cone, &d.u2, ctx.tol)? {
        return Ok(fail(input(), 0.0, "dual part outside the dual cone"));
    }
    let sum = dual_norm(space, &d.u1)? + dual_norm(space, &d.u2)?;
    if (sum - nf).abs() > ctx.tol.max(1e-8) * nf.max(1.0) {
        return Ok(fail(input(), sum - nf, "dual norms are not additive"));
    }
    if !d.ortho_verdict.as_ref().map_or(false, |x| x.is_orthogonal()) {
        let r = d.ortho_verdict.as_ref().map_or(0.0, |x| x.worst_residual);
        return Ok(fail(input(), r, "dual parts are not 1-orthogonal"));
    }
    Ok(Outcome::Pass)
}
