#![allow(dead_code)]

//! Test-only oracles, independent of the library's solution paths.

use rand::Rng;

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` if singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-11 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Maximum of `c·x` over `{x : rows·x ≤ rhs}` by enumerating every vertex.
/// Assumes the polytope is bounded; returns `None` if it has no vertex.
pub fn vertex_enumeration(c: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut best: Option<f64> = None;
    for idx in combinations(rows.len(), n) {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| rhs[i]).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible = rows.iter().zip(rhs).all(|(r, &h)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= h + 1e-9);
            if feasible {
                let val: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(val, |b: f64| b.max(val)));
            }
        }
    }
    best
}

/// A random bounded LP `max c·x, A x ≤ b, 0 ≤ x ≤ 5` in dimension `n`,
/// returned as the full inequality system (bounds included).
pub struct RandomLp {
    pub c: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

pub fn random_bounded_lp<R: Rng>(rng: &mut R, n: usize) -> RandomLp {
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        let mut lo = vec![0.0; n];
        lo[i] = -1.0;
        rows.push(lo);
        rhs.push(0.0);
        let mut hi = vec![0.0; n];
        hi[i] = 1.0;
        rows.push(hi);
        rhs.push(5.0);
    }
    let extra = rng.gen_range(1..=3);
    for _ in 0..extra {
        rows.push((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
        rhs.push(rng.gen_range(0.5..4.0));
    }
    RandomLp { c, rows, rhs }
}
