//! Ordered normed spaces: a positive cone paired with one of the supported
//! norm families, plus the exponent `p` the space is claimed to be smooth for.
//!
//! Every family exposes `norm` and `dual_norm`. The polyhedral families also
//! expose LP descriptions of their primal and dual unit balls, which the
//! support and decomposition code optimise over.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cones::{as_symmetric, cone_proper_generating, is_interior, ConeKind, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg::{eigen_sym, rank, solve_lp, LpProblem, Matrix, Vector};

/// Elements of the dual space, paired with vectors by the dot product.
pub type Functional = Vector;

/// An exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::input(format!("invalid exponent {p}: must lie in [1, inf]")));
        }
        Ok(if p.is_infinite() { Exponent::Infinity } else { Exponent::Finite(p) })
    }

    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::ONE,
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `(a^p + b^p)^{1/p}`, or `max(a, b)` for `p = ∞`.
    pub fn aggregate(self, a: f64, b: f64) -> f64 {
        match self {
            Exponent::Infinity => a.max(b),
            Exponent::Finite(p) if p == 1.0 => a + b,
            Exponent::Finite(p) => (a.powf(p) + b.powf(p)).powf(1.0 / p),
        }
    }

    /// ℓ_p norm of a coefficient sequence.
    pub fn lp_norm(self, coeffs: &[f64]) -> f64 {
        match self {
            Exponent::Infinity => coeffs.iter().fold(0.0, |m, c| m.max(c.abs())),
            Exponent::Finite(p) if p == 1.0 => coeffs.iter().map(|c| c.abs()).sum(),
            Exponent::Finite(p) if p == 2.0 => coeffs.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Exponent::Finite(p) => coeffs.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::new(p).map_err(serde::de::Error::custom),
            Raw::Text(t) if t == "inf" => Ok(Exponent::Infinity),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid exponent {t:?}: expected a number or \"inf\""))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    /// `(Σ w_i |x_i|^p)^{1/p}`, or `max w_i |x_i|` for `p = ∞`.
    Lp { p: Exponent, weights: Option<Vector> },
    Sup,
    /// `min{k ≥ 0 : −k e ≤ x ≤ k e}`
    OrderUnit { e: Vector },
    /// `min{φ(u₁) + φ(u₂) : x = u₁ − u₂, u_i ∈ V⁺}`
    Base { phi: Functional },
    /// Largest absolute eigenvalue of a symmetric matrix.
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    pub dim: usize,
    pub cone: ConeSpec,
    pub norm: NormKind,
    pub p_class: Exponent,
}

impl SpaceSpec {
    /// Validates and builds a space.
    pub fn new(dim: usize, cone: ConeSpec, norm: NormKind, p_class: Exponent) -> Result<Self> {
        let space = SpaceSpec { dim, cone, norm, p_class };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim;
        if dim == 0 {
            return Err(Error::input("dim: must be positive"));
        }
        if self.cone.ambient_dim != dim {
            return Err(Error::input(format!("cone: ambient dimension {} does not match dim {dim}", self.cone.ambient_dim)));
        }
        if let ConeKind::Rays(g) = &self.cone.kind {
            if g.iter().any(|gi| gi.dim() != dim) {
                return Err(Error::input("cone: generator dimension does not match dim"));
            }
        }
        let report = cone_proper_generating(&self.cone)?;
        if !report.proper {
            return Err(Error::input("cone not proper"));
        }
        if !report.generating {
            return Err(Error::input("cone not generating"));
        }
        if let Exponent::Finite(p) = self.p_class {
            Exponent::new(p)?;
        }
        match &self.norm {
            NormKind::Lp { p, weights } => {
                if let Exponent::Finite(q) = p {
                    Exponent::new(*q)?;
                }
                if let Some(w) = weights {
                    if w.dim() != dim {
                        return Err(Error::input("norm.weights: length does not match dim"));
                    }
                    if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                        return Err(Error::input("norm.weights: must be strictly positive"));
                    }
                }
            }
            NormKind::Sup => {}
            NormKind::OrderUnit { e } => {
                if e.dim() != dim {
                    return Err(Error::input("norm.e: length does not match dim"));
                }
                if !is_interior(&self.cone, e)? {
                    return Err(Error::input("order unit not interior"));
                }
            }
            NormKind::Base { phi } => {
                if phi.dim() != dim {
                    return Err(Error::input("norm.phi: length does not match dim"));
                }
                let positive = match &self.cone.kind {
                    ConeKind::Psd { .. } => is_interior(&self.cone, phi)?,
                    _ => self.cone.generators().unwrap().iter().all(|g| phi.dot(g) > 0.0),
                };
                if !positive {
                    return Err(Error::input("base functional not strictly positive on the cone"));
                }
            }
            NormKind::Spectral => {
                if !self.cone.is_psd() {
                    return Err(Error::input("spectral norm requires a psd cone"));
                }
            }
        }
        Ok(())
    }

    pub fn lp(dim: usize, p: Exponent) -> Self {
        SpaceSpec { dim, cone: ConeSpec::orthant(dim), norm: NormKind::Lp { p, weights: None }, p_class: p }
    }

    pub fn sup(dim: usize) -> Self {
        SpaceSpec { dim, cone: ConeSpec::orthant(dim), norm: NormKind::Sup, p_class: Exponent::Infinity }
    }

    /// Order-unit space over `cone` with unit `e`.
    pub fn order_unit(cone: ConeSpec, e: Vector) -> Result<Self> {
        Self::new(cone.ambient_dim, cone, NormKind::OrderUnit { e }, Exponent::Infinity)
    }

    /// Base-normed space over `cone` with strictly positive `phi`.
    pub fn base(cone: ConeSpec, phi: Functional) -> Result<Self> {
        Self::new(cone.ambient_dim, cone, NormKind::Base { phi }, Exponent::ONE)
    }

    /// Symmetric `side × side` matrices with the operator norm.
    pub fn spectral(side: usize) -> Self {
        SpaceSpec { dim: side * side, cone: ConeSpec::psd(side), norm: NormKind::Spectral, p_class: Exponent::Infinity }
    }

    /// The order unit when the norm has one (`I` for the spectral family,
    /// all-ones for `Sup` over the orthant).
    pub fn order_unit_element(&self) -> Option<Vector> {
        match (&self.norm, &self.cone.kind) {
            (NormKind::OrderUnit { e }, _) => Some(e.clone()),
            (NormKind::Spectral, ConeKind::Psd { side }) => Some(Matrix::identity(*side).to_flat()),
            (NormKind::Sup, ConeKind::NonnegOrthant) => Some(Vector::filled(self.dim, 1.0)),
            (NormKind::Lp { p: Exponent::Infinity, weights }, ConeKind::NonnegOrthant) => {
                Some(weights.as_ref().map_or(Vector::filled(self.dim, 1.0), |w| w.map(|x| 1.0 / x)))
            }
            _ => None,
        }
    }

    /// Whether norms and dual norms are described by linear programs.
    pub fn is_polyhedral(&self) -> bool {
        match &self.norm {
            NormKind::Lp { p, .. } => *p == Exponent::ONE || p.is_infinite(),
            NormKind::Sup => true,
            NormKind::OrderUnit { .. } | NormKind::Base { .. } => !self.cone.is_psd(),
            NormKind::Spectral => false,
        }
    }

    pub fn describe(&self) -> String {
        let cone = match &self.cone.kind {
            ConeKind::NonnegOrthant => "orthant".to_string(),
            ConeKind::Rays(g) => format!("rays[{}]", g.len()),
            ConeKind::Psd { side } => format!("psd[{side}]"),
        };
        let norm = match &self.norm {
            NormKind::Lp { p, .. } => format!("lp(p={p})"),
            NormKind::Sup => "sup".into(),
            NormKind::OrderUnit { .. } => "order_unit".into(),
            NormKind::Base { .. } => "base".into(),
            NormKind::Spectral => "spectral".into(),
        };
        format!("{norm} over {cone} in dim {} (p_class={})", self.dim, self.p_class)
    }

    pub(crate) fn check(&self, x: &Vector, what: &str) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::input(format!("{what} has dimension {} but the space has dimension {}", x.dim(), self.dim)));
        }
        Ok(())
    }
}

/// `M^{1/2}` and `M^{-1/2}` of a positive definite matrix.
pub(crate) fn sqrt_pair(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let d = eigen_sym(m)?;
    if d.min_eigenvalue() <= 0.0 {
        return Err(Error::input("matrix is not positive definite"));
    }
    Ok((d.apply(f64::sqrt), d.apply(|l| 1.0 / l.sqrt())))
}

/// `A X A` for symmetric `A`.
pub(crate) fn congruence(a: &Matrix, x: &Matrix) -> Matrix {
    a.matmul(x).matmul(a).symmetrized()
}

pub fn norm(space: &SpaceSpec, x: &Vector) -> Result<f64> {
    space.check(x, "vector")?;
    if x.is_zero(0.0) {
        return Ok(0.0);
    }
    match &space.norm {
        NormKind::Lp { p, weights } => Ok(weighted_lp(x, *p, weights.as_ref())),
        NormKind::Sup => Ok(x.max_abs()),
        NormKind::OrderUnit { e } => match &space.cone.kind {
            ConeKind::NonnegOrthant => Ok(x.iter().zip(e.iter()).fold(0.0, |m, (xi, ei)| m.max(xi.abs() / ei))),
            ConeKind::Rays(g) => order_unit_norm_lp(g, e, x),
            ConeKind::Psd { .. } => {
                let (_, inv_half) = sqrt_pair(&as_symmetric(e)?)?;
                Ok(eigen_sym(&congruence(&inv_half, &as_symmetric(x)?))?.max_abs_eigenvalue())
            }
        },
        NormKind::Base { phi } => match &space.cone.kind {
            ConeKind::NonnegOrthant => Ok(x.iter().zip(phi.iter()).map(|(xi, w)| w * xi.abs()).sum()),
            ConeKind::Rays(g) => base_norm_lp(g, phi, x),
            ConeKind::Psd { .. } => {
                let (half, _) = sqrt_pair(&as_symmetric(phi)?)?;
                Ok(eigen_sym(&congruence(&half, &as_symmetric(x)?))?.abs_sum())
            }
        },
        NormKind::Spectral => Ok(eigen_sym(&as_symmetric(x)?)?.max_abs_eigenvalue()),
    }
}

fn weighted_lp(x: &Vector, p: Exponent, weights: Option<&Vector>) -> f64 {
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    match p {
        Exponent::Infinity => x.iter().enumerate().fold(0.0, |m, (i, xi)| m.max(w(i) * xi.abs())),
        Exponent::Finite(p) if p == 1.0 => x.iter().enumerate().map(|(i, xi)| w(i) * xi.abs()).sum(),
        Exponent::Finite(p) => {
            // scale first so large p cannot overflow
            let s = x.max_abs();
            let sum: f64 = x.iter().enumerate().map(|(i, xi)| w(i) * (xi.abs() / s).powf(p)).sum();
            s * sum.powf(1.0 / p)
        }
    }
}

fn order_unit_norm_lp(gens: &[Vector], e: &Vector, x: &Vector) -> Result<f64> {
    let k = gens.len();
    let n = x.dim();
    // variables: t, a (k), b (k); t e − G a = x, t e − G b = −x
    let mut obj = vec![0.0; 1 + 2 * k];
    obj[0] = 1.0;
    let mut lp = LpProblem::minimize(Vector::from(obj)).nonneg();
    for i in 0..n {
        let mut row_a = vec![0.0; 1 + 2 * k];
        let mut row_b = vec![0.0; 1 + 2 * k];
        row_a[0] = e[i];
        row_b[0] = e[i];
        for (j, g) in gens.iter().enumerate() {
            row_a[1 + j] = -g[i];
            row_b[1 + k + j] = -g[i];
        }
        lp = lp.eq(Vector::from(row_a), x[i]).eq(Vector::from(row_b), -x[i]);
    }
    let (opt, _) = solve_lp(&lp)?.into_optimal("order-unit norm")?;
    Ok(-opt)
}

fn base_norm_lp(gens: &[Vector], phi: &Vector, x: &Vector) -> Result<f64> {
    let k = gens.len();
    let weights: Vec<f64> = gens.iter().map(|g| phi.dot(g)).collect();
    let obj: Vec<f64> = weights.iter().chain(weights.iter()).copied().collect();
    let mut lp = LpProblem::minimize(Vector::from(obj)).nonneg();
    for i in 0..x.dim() {
        let mut row = vec![0.0; 2 * k];
        for (j, g) in gens.iter().enumerate() {
            row[j] = g[i];
            row[k + j] = -g[i];
        }
        lp = lp.eq(Vector::from(row), x[i]);
    }
    let (opt, _) = solve_lp(&lp)?.into_optimal("base norm")?;
    Ok(-opt)
}

pub fn dual_norm(space: &SpaceSpec, f: &Functional) -> Result<f64> {
    space.check(f, "functional")?;
    if f.is_zero(0.0) {
        return Ok(0.0);
    }
    match &space.norm {
        NormKind::Lp { p, weights } => {
            let q = p.conjugate();
            // substitute z_i = w_i^{1/p} x_i
            let g = match (weights, p) {
                (None, _) => f.clone(),
                (Some(w), Exponent::Infinity) => Vector::from(f.iter().zip(w.iter()).map(|(fi, wi)| fi / wi).collect::<Vec<_>>()),
                (Some(w), Exponent::Finite(p)) => Vector::from(f.iter().zip(w.iter()).map(|(fi, wi)| fi / wi.powf(1.0 / p)).collect::<Vec<_>>()),
            };
            Ok(weighted_lp(&g, q, None))
        }
        NormKind::Sup => Ok(f.iter().map(|x| x.abs()).sum()),
        NormKind::OrderUnit { e } => match &space.cone.kind {
            ConeKind::NonnegOrthant => Ok(f.iter().zip(e.iter()).map(|(fi, ei)| fi.abs() * ei).sum()),
            ConeKind::Rays(_) => maximize_over_ball(space, f),
            ConeKind::Psd { .. } => {
                let (half, _) = sqrt_pair(&as_symmetric(e)?)?;
                Ok(eigen_sym(&congruence(&half, &as_symmetric(f)?))?.abs_sum())
            }
        },
        NormKind::Base { phi } => match &space.cone.kind {
            ConeKind::NonnegOrthant | ConeKind::Rays(_) => {
                let gens = space.cone.generators().unwrap();
                Ok(gens.iter().fold(0.0, |m, g| m.max(f.dot(g).abs() / phi.dot(g))))
            }
            ConeKind::Psd { .. } => {
                let (_, inv_half) = sqrt_pair(&as_symmetric(phi)?)?;
                Ok(eigen_sym(&congruence(&inv_half, &as_symmetric(f)?))?.max_abs_eigenvalue())
            }
        },
        NormKind::Spectral => Ok(eigen_sym(&as_symmetric(f)?)?.abs_sum()),
    }
}

/// `max f(x)` over the primal unit ball, by LP. Only for polyhedral spaces.
pub fn maximize_over_ball(space: &SpaceSpec, f: &Functional) -> Result<f64> {
    let ball = unit_ball(space)?;
    let n = space.dim;
    let mut obj = vec![0.0; ball.width()];
    obj[..n].copy_from_slice(f);
    let lp = ball.problem(Vector::from(obj), 0);
    Ok(solve_lp(&lp)?.into_optimal("dual norm")?.0)
}

/// A polyhedral set `{x : ∃ z ≥ 0, rows over (x, z) hold}` with `x` free.
#[derive(Clone, Debug)]
pub struct BallLp {
    pub n: usize,
    pub n_aux: usize,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

impl BallLp {
    fn new(n: usize, n_aux: usize) -> Self {
        BallLp { n, n_aux, eq: Vec::new(), le: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.n + self.n_aux
    }

    /// Builds `max obj · (x, z, extra)` with `extra` free variables appended;
    /// rows stored here are zero-padded over the extra columns.
    pub fn problem(&self, obj: Vector, extra: usize) -> LpProblem {
        let total = self.width() + extra;
        let pad = |r: &Vec<f64>| {
            let mut row = r.clone();
            row.resize(total, 0.0);
            Vector::from(row)
        };
        let mut lp = LpProblem::maximize(obj).nonneg_range(self.n..self.width());
        for (r, b) in &self.eq {
            lp = lp.eq(pad(r), *b);
        }
        for (r, b) in &self.le {
            lp = lp.le(pad(r), *b);
        }
        lp
    }

    /// `Σ |x_i| · w_i ≤ 1` using split variables.
    fn weighted_l1(n: usize, w: &[f64]) -> Self {
        let mut ball = BallLp::new(n, 2 * n);
        let mut budget = vec![0.0; 3 * n];
        for i in 0..n {
            let mut row = vec![0.0; 3 * n];
            row[i] = 1.0;
            row[n + i] = -1.0;
            row[2 * n + i] = 1.0;
            ball.eq.push((row, 0.0));
            budget[n + i] = w[i];
            budget[2 * n + i] = w[i];
        }
        ball.le.push((budget, 1.0));
        ball
    }

    /// `|x_i| ≤ r_i`
    fn boxed(n: usize, r: &[f64]) -> Self {
        let mut ball = BallLp::new(n, 0);
        for i in 0..n {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            ball.le.push((row.clone(), r[i]));
            row[i] = -1.0;
            ball.le.push((row, r[i]));
        }
        ball
    }
}

fn polyhedral_only(space: &SpaceSpec) -> Result<()> {
    if space.is_polyhedral() {
        Ok(())
    } else {
        Err(Error::unsupported(format!("{} has no LP description", space.describe())))
    }
}

/// LP description of `{x : ‖x‖ ≤ 1}`.
pub fn unit_ball(space: &SpaceSpec) -> Result<BallLp> {
    polyhedral_only(space)?;
    let n = space.dim;
    let ones = vec![1.0; n];
    Ok(match &space.norm {
        NormKind::Sup => BallLp::boxed(n, &ones),
        NormKind::Lp { p, weights } => {
            let w = weights.as_ref().map_or(ones.clone(), |w| w.as_slice().to_vec());
            if p.is_infinite() {
                BallLp::boxed(n, &w.iter().map(|x| 1.0 / x).collect::<Vec<_>>())
            } else {
                BallLp::weighted_l1(n, &w)
            }
        }
        NormKind::OrderUnit { e } => match &space.cone.kind {
            ConeKind::NonnegOrthant => BallLp::boxed(n, e),
            _ => {
                // e − x = G a, e + x = G b
                let g = space.cone.generators().unwrap();
                let k = g.len();
                let mut ball = BallLp::new(n, 2 * k);
                for i in 0..n {
                    let mut ra = vec![0.0; n + 2 * k];
                    let mut rb = vec![0.0; n + 2 * k];
                    ra[i] = 1.0;
                    rb[i] = -1.0;
                    for (j, gj) in g.iter().enumerate() {
                        ra[n + j] = gj[i];
                        rb[n + k + j] = gj[i];
                    }
                    ball.eq.push((ra, e[i]));
                    ball.eq.push((rb, e[i]));
                }
                ball
            }
        },
        NormKind::Base { phi } => match &space.cone.kind {
            ConeKind::NonnegOrthant => BallLp::weighted_l1(n, phi),
            _ => {
                // x = G a − G b, Σ φ(g)(a + b) ≤ 1
                let g = space.cone.generators().unwrap();
                let k = g.len();
                let mut ball = BallLp::new(n, 2 * k);
                for i in 0..n {
                    let mut row = vec![0.0; n + 2 * k];
                    row[i] = 1.0;
                    for (j, gj) in g.iter().enumerate() {
                        row[n + j] = -gj[i];
                        row[n + k + j] = gj[i];
                    }
                    ball.eq.push((row, 0.0));
                }
                let mut budget = vec![0.0; n + 2 * k];
                for (j, gj) in g.iter().enumerate() {
                    budget[n + j] = phi.dot(gj);
                    budget[n + k + j] = phi.dot(gj);
                }
                ball.le.push((budget, 1.0));
                ball
            }
        },
        NormKind::Spectral => unreachable!(),
    })
}

/// LP description of `{f : ‖f‖′ ≤ 1}`.
pub fn dual_unit_ball(space: &SpaceSpec) -> Result<BallLp> {
    polyhedral_only(space)?;
    let n = space.dim;
    let ones = vec![1.0; n];
    Ok(match &space.norm {
        NormKind::Sup => BallLp::weighted_l1(n, &ones),
        NormKind::Lp { p, weights } => {
            let w = weights.as_ref().map_or(ones.clone(), |w| w.as_slice().to_vec());
            if p.is_infinite() {
                BallLp::weighted_l1(n, &w.iter().map(|x| 1.0 / x).collect::<Vec<_>>())
            } else {
                BallLp::boxed(n, &w)
            }
        }
        NormKind::OrderUnit { e } => match &space.cone.kind {
            ConeKind::NonnegOrthant => BallLp::weighted_l1(n, e),
            _ => {
                // f = f₁ − f₂ with f₁, f₂ in the dual cone and f₁(e) + f₂(e) ≤ 1.
                // aux: slacks s₁, s₂ (f_i(g_j) = s_ij ≥ 0), then f₁ = p₁ − m₁, f₂ = p₂ − m₂
                let g = space.cone.generators().unwrap();
                let k = g.len();
                let width = n + 2 * k + 4 * n;
                let (s1, s2, p1, m1, p2, m2) = (n, n + k, n + 2 * k, n + 2 * k + n, n + 2 * k + 2 * n, n + 2 * k + 3 * n);
                let mut ball = BallLp::new(n, 2 * k + 4 * n);
                for i in 0..n {
                    // f − f₁ + f₂ = 0
                    let mut row = vec![0.0; width];
                    row[i] = 1.0;
                    row[p1 + i] = -1.0;
                    row[m1 + i] = 1.0;
                    row[p2 + i] = 1.0;
                    row[m2 + i] = -1.0;
                    ball.eq.push((row, 0.0));
                }
                for (j, gj) in g.iter().enumerate() {
                    // f₁(g_j) − s₁j = 0, f₂(g_j) − s₂j = 0
                    let mut r1 = vec![0.0; width];
                    let mut r2 = vec![0.0; width];
                    for i in 0..n {
                        r1[p1 + i] = gj[i];
                        r1[m1 + i] = -gj[i];
                        r2[p2 + i] = gj[i];
                        r2[m2 + i] = -gj[i];
                    }
                    r1[s1 + j] = -1.0;
                    r2[s2 + j] = -1.0;
                    ball.eq.push((r1, 0.0));
                    ball.eq.push((r2, 0.0));
                }
                let mut budget = vec![0.0; width];
                for i in 0..n {
                    budget[p1 + i] = e[i];
                    budget[m1 + i] = -e[i];
                    budget[p2 + i] = e[i];
                    budget[m2 + i] = -e[i];
                }
                ball.le.push((budget, 1.0));
                ball
            }
        },
        NormKind::Base { phi } => {
            // |f(g)| ≤ φ(g) for each generator
            let g = space.cone.generators().unwrap();
            let mut ball = BallLp::new(n, 0);
            for gj in &g {
                let bound = phi.dot(gj);
                ball.le.push((gj.as_slice().to_vec(), bound));
                ball.le.push(((-gj).into_inner(), bound));
            }
            ball
        }
        NormKind::Spectral => unreachable!(),
    })
}

/// Norm of the functional `λ₁u₁ + λ₂u₂ ↦ λ₁α₁ + λ₂α₂` on `W = span{u₁, u₂}`.
///
/// Scans 720 directions of the unit circle in `(λ₁, λ₂)` coordinates, scales
/// each onto the unit sphere of `W`, then golden-section refines around the
/// three best directions.
pub fn restricted_norm(space: &SpaceSpec, span_basis: (&Vector, &Vector), g_values: (f64, f64)) -> Result<f64> {
    RestrictedNorm::new(space, span_basis.0, span_basis.1)?.dual_norm(g_values)
}

/// Cached angular profile of the norm on a two-dimensional subspace.
pub struct RestrictedNorm<'a> {
    space: &'a SpaceSpec,
    u1: Vector,
    u2: Vector,
    radii: Vec<f64>,
}

pub const SCAN_DIRECTIONS: usize = 720;

impl<'a> RestrictedNorm<'a> {
    pub fn new(space: &'a SpaceSpec, u1: &Vector, u2: &Vector) -> Result<Self> {
        space.check(u1, "u1")?;
        space.check(u2, "u2")?;
        if rank(&[u1.clone(), u2.clone()], 1e-10) < 2 {
            return Err(Error::input("span basis is linearly dependent"));
        }
        let mut rn = RestrictedNorm { space, u1: u1.clone(), u2: u2.clone(), radii: Vec::with_capacity(SCAN_DIRECTIONS) };
        for i in 0..SCAN_DIRECTIONS {
            let theta = 2.0 * PI * i as f64 / SCAN_DIRECTIONS as f64;
            let r = rn.norm_at(theta)?;
            rn.radii.push(r);
        }
        Ok(rn)
    }

    fn norm_at(&self, theta: f64) -> Result<f64> {
        norm(self.space, &self.u1.scale(theta.cos()).axpy(theta.sin(), &self.u2))
    }

    pub fn dual_norm(&self, (a1, a2): (f64, f64)) -> Result<f64> {
        if a1 == 0.0 && a2 == 0.0 {
            return Ok(0.0);
        }
        let ratio = |theta: f64, r: f64| (a1 * theta.cos() + a2 * theta.sin()).abs() / r;
        let step = 2.0 * PI / SCAN_DIRECTIONS as f64;
        let mut scored: Vec<(f64, usize)> =
            self.radii.iter().enumerate().map(|(i, &r)| (ratio(i as f64 * step, r), i)).collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = scored[0].0;
        for &(_, i) in scored.iter().take(3) {
            let centre = i as f64 * step;
            let h = |t: f64| -> Result<f64> { Ok(ratio(t, self.norm_at(t)?)) };
            best = best.max(golden_max(h, centre - step, centre + step, 1e-10)?);
        }
        Ok(best)
    }
}

fn golden_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = fc.max(fd);
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
        }
        best = best.max(fc).max(fd);
    }
    Ok(best)
}

/// Exact restricted dual norm for polyhedral spaces:
/// `max λ·α` over `{λ : ‖λ₁u₁ + λ₂u₂‖ ≤ 1}`.
pub fn restricted_norm_lp(space: &SpaceSpec, span_basis: (&Vector, &Vector), g_values: (f64, f64)) -> Result<f64> {
    let ball = unit_ball(space)?;
    let (u1, u2) = span_basis;
    let w = ball.width();
    let mut obj = vec![0.0; w + 2];
    obj[w] = g_values.0;
    obj[w + 1] = g_values.1;
    let mut lp = ball.problem(Vector::from(obj.clone()), 2);
    for i in 0..space.dim {
        let mut row = vec![0.0; w + 2];
        row[i] = 1.0;
        row[w] = -u1[i];
        row[w + 1] = -u2[i];
        lp = lp.eq(Vector::from(row), 0.0);
    }
    let (pos, _) = solve_lp(&lp)?.into_optimal("restricted norm")?;
    // the ball is symmetric, so the absolute value is the same maximum
    Ok(pos.abs())
}
