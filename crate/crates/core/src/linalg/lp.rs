//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems are stated in maximisation form with equality rows, `≤` rows and
//! per-variable lower bounds (a missing bound means the variable is free).

use super::{dot, Vector};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vector,
    pub eq_constraints: Vec<(Vector, f64)>,
    /// `row · x ≤ bound`
    pub ineq_constraints: Vec<(Vector, f64)>,
    /// `None` marks a free variable.
    pub lower_bounds: Vec<Option<f64>>,
}

impl LpProblem {
    /// Maximise `objective · x` over free variables; add rows with the builder methods.
    pub fn maximize(objective: Vector) -> Self {
        let n = objective.dim();
        LpProblem { objective, eq_constraints: Vec::new(), ineq_constraints: Vec::new(), lower_bounds: vec![None; n] }
    }

    /// Stored as maximising `-objective`, so a reported `optimum` is the negated minimum.
    pub fn minimize(objective: Vector) -> Self {
        Self::maximize(-&objective)
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn eq(mut self, row: Vector, rhs: f64) -> Self {
        self.eq_constraints.push((row, rhs));
        self
    }

    pub fn le(mut self, row: Vector, rhs: f64) -> Self {
        self.ineq_constraints.push((row, rhs));
        self
    }

    pub fn ge(mut self, row: Vector, rhs: f64) -> Self {
        self.ineq_constraints.push((-&row, -rhs));
        self
    }

    pub fn lower_bound(mut self, var: usize, bound: f64) -> Self {
        self.lower_bounds[var] = Some(bound);
        self
    }

    /// Puts a zero lower bound on every variable.
    pub fn nonneg(mut self) -> Self {
        self.lower_bounds.iter_mut().for_each(|b| *b = Some(0.0));
        self
    }

    /// Puts a zero lower bound on variables in `range`.
    pub fn nonneg_range(mut self, range: std::ops::Range<usize>) -> Self {
        for i in range {
            self.lower_bounds[i] = Some(0.0);
        }
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.lower_bounds.len() != n {
            return Err(Error::input(format!("{} lower bounds for {n} variables", self.lower_bounds.len())));
        }
        for (kind, rows) in [("equality", &self.eq_constraints), ("inequality", &self.ineq_constraints)] {
            for (i, (row, rhs)) in rows.iter().enumerate() {
                if row.dim() != n {
                    return Err(Error::input(format!("{kind} row {i} has length {} but the problem has {n} variables", row.dim())));
                }
                if !rhs.is_finite() || row.iter().any(|x| !x.is_finite()) {
                    return Err(Error::input(format!("{kind} row {i} has a non-finite entry")));
                }
            }
        }
        if self.objective.iter().any(|x| !x.is_finite()) || self.lower_bounds.iter().flatten().any(|b| !b.is_finite()) {
            return Err(Error::input("objective or bounds not finite"));
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, rhs) in &self.eq_constraints {
            worst = worst.max((dot(row, x) - rhs).abs());
        }
        for (row, rhs) in &self.ineq_constraints {
            worst = worst.max(dot(row, x) - rhs);
        }
        for (xi, lb) in x.iter().zip(&self.lower_bounds) {
            if let Some(l) = lb {
                worst = worst.max(l - xi);
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { optimum: f64, argument: Vector },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { optimum, .. } => Some(*optimum),
            _ => None,
        }
    }

    pub fn argument(&self) -> Option<&Vector> {
        match self {
            LpOutcome::Optimal { argument, .. } => Some(argument),
            _ => None,
        }
    }

    /// Unwraps an optimal outcome or reports which status was hit.
    pub fn into_optimal(self, context: &str) -> Result<(f64, Vector)> {
        match self {
            LpOutcome::Optimal { optimum, argument } => Ok((optimum, argument)),
            LpOutcome::Infeasible => Err(Error::Numerical(format!("{context}: LP infeasible"))),
            LpOutcome::Unbounded => Err(Error::Numerical(format!("{context}: LP unbounded"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LpConfig {
    /// Smallest admissible pivot magnitude and reduced-cost threshold.
    pub pivot_tol: f64,
    /// Phase-one residual above which the problem is declared infeasible
    /// (scaled by `1 + max|rhs|`).
    pub feas_tol: f64,
    pub max_pivots: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig { pivot_tol: 1e-9, feas_tol: 1e-9, max_pivots: 100_000 }
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpOutcome> {
    solve_lp_with(problem, &LpConfig::default())
}

pub fn solve_lp_with(problem: &LpProblem, cfg: &LpConfig) -> Result<LpOutcome> {
    problem.validate()?;
    let n = problem.dim();

    // column layout of the standard-form variables y ≥ 0
    let mut shift = vec![0.0; n];
    let mut cols: Vec<(usize, f64)> = Vec::new(); // (original var, sign)
    for (i, lb) in problem.lower_bounds.iter().enumerate() {
        match lb {
            Some(l) => {
                shift[i] = *l;
                cols.push((i, 1.0));
            }
            None => {
                cols.push((i, 1.0));
                cols.push((i, -1.0));
            }
        }
    }
    let n_struct = cols.len();
    let n_eq = problem.eq_constraints.len();
    let n_ineq = problem.ineq_constraints.len();
    let m = n_eq + n_ineq;
    let n_slack = n_ineq;
    let art0 = n_struct + n_slack;
    let total = art0 + m;

    let mut t = Tableau::new(m, total);
    let rows = problem.eq_constraints.iter().map(|r| (r, false)).chain(problem.ineq_constraints.iter().map(|r| (r, true)));
    let mut slack = n_struct;
    for (r, ((row, rhs), is_ineq)) in rows.enumerate() {
        for (j, &(var, sign)) in cols.iter().enumerate() {
            t.set(r, j, sign * row[var]);
        }
        let mut b = rhs - dot(row, &shift);
        if is_ineq {
            t.set(r, slack, 1.0);
            slack += 1;
        }
        if b < 0.0 {
            for j in 0..art0 {
                let x = t.get(r, j);
                t.set(r, j, -x);
            }
            b = -b;
        }
        t.set(r, art0 + r, 1.0);
        t.set_rhs(r, b);
        t.basis[r] = art0 + r;
    }
    let rhs_scale = 1.0 + (0..m).map(|r| t.rhs(r)).fold(0.0, f64::max);

    // phase one: maximise −Σ artificials
    let mut c1 = vec![0.0; total];
    c1[art0..].iter_mut().for_each(|c| *c = -1.0);
    t.load_objective(&c1);
    match t.run(total, cfg)? {
        Phase::Optimal => {}
        Phase::Unbounded => return Err(Error::Numerical("phase one reported unbounded".into())),
    }
    if -t.value() > cfg.feas_tol * rhs_scale {
        return Ok(LpOutcome::Infeasible);
    }

    // drive remaining artificials out of the basis; drop redundant rows
    let mut r = 0;
    while r < t.m {
        if t.basis[r] >= art0 {
            let col = (0..art0).filter(|&j| t.get(r, j).abs() > cfg.pivot_tol).max_by(|&a, &b| t.get(r, a).abs().total_cmp(&t.get(r, b).abs()));
            match col {
                Some(j) => t.pivot(r, j),
                None => {
                    t.remove_row(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // phase two over structural and slack columns
    let mut c2 = vec![0.0; total];
    for (j, &(var, sign)) in cols.iter().enumerate() {
        c2[j] = sign * problem.objective[var];
    }
    t.load_objective(&c2);
    match t.run(art0, cfg)? {
        Phase::Unbounded => return Ok(LpOutcome::Unbounded),
        Phase::Optimal => {}
    }

    let mut y = vec![0.0; total];
    for (r, &bv) in t.basis.iter().enumerate() {
        y[bv] = t.rhs(r).max(0.0);
    }
    let mut x = shift;
    for (j, &(var, sign)) in cols.iter().enumerate() {
        x[var] += sign * y[j];
    }
    let optimum = dot(&problem.objective, &x);
    Ok(LpOutcome::Optimal { optimum, argument: Vector::from(x) })
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    width: usize,
    /// `m` rows of `width` coefficients followed by the right-hand side
    data: Vec<f64>,
    /// reduced costs followed by minus the objective value
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(m: usize, width: usize) -> Self {
        Tableau { m, width, data: vec![0.0; m * (width + 1)], obj: vec![0.0; width + 1], basis: vec![0; m] }
    }

    #[inline]
    fn get(&self, r: usize, j: usize) -> f64 {
        self.data[r * (self.width + 1) + j]
    }

    #[inline]
    fn set(&mut self, r: usize, j: usize, x: f64) {
        self.data[r * (self.width + 1) + j] = x;
    }

    fn rhs(&self, r: usize) -> f64 {
        self.get(r, self.width)
    }

    fn set_rhs(&mut self, r: usize, x: f64) {
        let w = self.width;
        self.set(r, w, x);
    }

    fn row(&self, r: usize) -> &[f64] {
        let s = r * (self.width + 1);
        &self.data[s..s + self.width + 1]
    }

    fn value(&self) -> f64 {
        -self.obj[self.width]
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width + 1;
        self.data.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.m -= 1;
    }

    fn load_objective(&mut self, c: &[f64]) {
        self.obj[..self.width].copy_from_slice(c);
        self.obj[self.width] = 0.0;
        for r in 0..self.m {
            let cb = c[self.basis[r]];
            if cb != 0.0 {
                let s = r * (self.width + 1);
                for (o, a) in self.obj.iter_mut().zip(&self.data[s..s + self.width + 1]) {
                    *o -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width + 1;
        let p = self.get(pr, pc);
        for j in 0..w {
            self.data[pr * w + j] /= p;
        }
        let prow: Vec<f64> = self.row(pr).to_vec();
        for r in 0..self.m {
            if r == pr {
                continue;
            }
            let f = self.get(r, pc);
            if f != 0.0 {
                for (x, a) in self.data[r * w..(r + 1) * w].iter_mut().zip(&prow) {
                    *x -= f * a;
                }
                self.set(r, pc, 0.0);
            }
        }
        let f = self.obj[pc];
        if f != 0.0 {
            for (o, a) in self.obj.iter_mut().zip(&prow) {
                *o -= f * a;
            }
            self.obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Primal simplex over columns `0..allowed` with Bland's rule.
    fn run(&mut self, allowed: usize, cfg: &LpConfig) -> Result<Phase> {
        for _ in 0..cfg.max_pivots {
            let Some(pc) = (0..allowed).find(|&j| self.obj[j] > cfg.pivot_tol) else {
                return Ok(Phase::Optimal);
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.m {
                let a = self.get(r, pc);
                if a > cfg.pivot_tol {
                    let ratio = self.rhs(r).max(0.0) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bv)) => ratio < br - 1e-15 || (ratio <= br + 1e-15 && self.basis[r] < bv),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                None => return Ok(Phase::Unbounded),
                Some((_, pr, _)) => self.pivot(pr, pc),
            }
        }
        Err(Error::Numerical(format!("simplex exceeded {} pivots", cfg.max_pivots)))
    }
}
