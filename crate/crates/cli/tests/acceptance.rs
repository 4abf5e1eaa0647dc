//! Acceptance gate. Prints one PASS/FAIL line per criterion, then fails if any
//! line failed. Run with `--nocapture` to see the table.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orthospace::cones::{cone_contains, dual_cone_contains, pairing};
use orthospace::harness::{
    build_example_46, certify_example_46, default_families, positive_orthonormal_set, run_on_defaults, run_suite, sample_cone_with, signed_orthonormal_set, SuiteId,
    SuiteReport, EXAMPLE_46_GRID,
};
use orthospace::linalg::{solve_lp, LpOutcome, LpProblem};
use orthospace::ortho::{p_orthogonal_exact, p_orthogonal_numeric, OrthoConfig, Verdict};
use orthospace::spaces::{dual_norm, norm, Exponent, SpaceSpec};
use orthospace::support::positive_support;
use orthospace::Vector;

struct Line {
    name: &'static str,
    ok: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(name: &'static str, budget: Option<Duration>, check: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (ok, mut detail) = check();
    let elapsed = start.elapsed();
    let in_time = budget.map_or(true, |b| elapsed < b);
    if let Some(b) = budget {
        detail.push_str(&format!("; budget {b:?}"));
    }
    Line { name, ok: ok && in_time, detail, elapsed }
}

fn family(name: &str) -> SpaceSpec {
    default_families().into_iter().find(|f| f.name == name).unwrap_or_else(|| panic!("no family {name}")).space
}

fn all_clean(reports: &[SuiteReport], samples: usize) -> (bool, String) {
    let ok = !reports.is_empty() && reports.iter().all(|r| !r.is_unsupported() && r.samples == samples && r.passes == samples && r.counterexamples.is_empty());
    let detail = reports.iter().map(|r| format!("{}/{} on {}", r.passes, r.samples, r.space)).collect::<Vec<_>>().join(", ");
    (ok, detail)
}

fn example() -> (bool, String) {
    let ex = build_example_46(EXAMPLE_46_GRID).unwrap();
    let c = certify_example_46(&ex, 1e-12).unwrap();
    let ok = c.passed(1e-12)
        && c.residual_lattice <= 1e-12
        && c.residual_squares <= 1e-12
        && c.norm_lattice_hat_sum == 1.0
        && c.norm_squares_hat_sum == 1.0
        && (c.max_gap - 0.5).abs() <= 1e-12;
    (ok, format!("hat sums {} and {}, gap {}, residuals {:e} {:e}", c.norm_lattice_hat_sum, c.norm_squares_hat_sum, c.max_gap, c.residual_lattice, c.residual_squares))
}

fn sparse(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vector {
    loop {
        let v: Vec<f64> = (0..n).map(|_| if rng.gen_bool(density) { rng.gen_range(-3.0..3.0) } else { 0.0 }).collect();
        if v.iter().any(|&a| a != 0.0) {
            return Vector::from(v);
        }
    }
}

fn oracle_equivalence() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = OrthoConfig::default();
    let mut disagreements = 0;
    let mut orthogonal = 0;
    let ps = [Exponent::Finite(1.0), Exponent::Finite(1.5), Exponent::Finite(2.0), Exponent::Finite(3.0), Exponent::Infinity];
    for p in ps {
        let space = SpaceSpec::lp(8, p);
        for _ in 0..2000 {
            let x = sparse(&mut rng, 8, 0.35);
            let mut y = sparse(&mut rng, 8, 0.35);
            // half the pairs get disjoint supports, which are orthogonal for every p
            if rng.gen_bool(0.5) {
                y = Vector::from(y.iter().zip(x.iter()).map(|(&b, &a)| if a == 0.0 { b } else { 0.0 }).collect::<Vec<_>>());
                if y.is_zero(0.0) {
                    continue;
                }
            }
            let exact = p_orthogonal_exact(&x, &y, p).unwrap();
            let numeric = p_orthogonal_numeric(&space, &x, &y, p, &cfg).unwrap().verdict;
            let expected = if exact { Verdict::Orthogonal } else { Verdict::NotOrthogonal };
            orthogonal += usize::from(exact);
            disagreements += usize::from(numeric != expected);
        }
    }
    (disagreements == 0, format!("{disagreements} disagreements, {orthogonal} orthogonal pairs"))
}

fn equivalence() -> (bool, String) {
    let reports: Vec<SuiteReport> = ["sup_order_unit_8", "rays_order_unit_4", "spectral_4"].iter().map(|name| run_suite(SuiteId::Thm33Equivalence, &family(name), 500, 1e-8, 0)).collect();
    all_clean(&reports, 500)
}

fn supports() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut failures = 0;
    let mut total = 0;
    for f in default_families() {
        for _ in 0..500 {
            let u = sample_cone_with(&f.space, &mut rng);
            total += 1;
            let ok = match positive_support(&f.space, &u) {
                Ok(s) => {
                    let nu = norm(&f.space, &u).unwrap();
                    (dual_norm(&f.space, &s.functional).unwrap() - 1.0).abs() <= 1e-8
                        && (pairing(&s.functional, &u) - nu).abs() <= 1e-8 * nu.max(1.0)
                        && dual_cone_contains(&f.space.cone, &s.functional, 1e-8).unwrap()
                }
                Err(_) => false,
            };
            failures += usize::from(!ok);
        }
    }
    (failures == 0, format!("{failures} failures in {total}"))
}

fn duality() -> (bool, String) {
    all_clean(&run_on_defaults(SuiteId::Thm44Duality, 500, 1e-8, 0), 500)
}

fn lemmas() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in [SuiteId::Lem27PositivePair, SuiteId::Lem28ConeCoeffs, SuiteId::Cor35InftyPair] {
        let (clean, detail) = all_clean(&run_on_defaults(id, 500, 1e-9, 0), 500);
        ok &= clean;
        parts.push(format!("{id}: {detail}"));
    }
    (ok, parts.join("; "))
}

fn embedding() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    let mut covered = Vec::new();
    for f in default_families() {
        let space = &f.space;
        let mut done = 0;
        let mut attempts = 0;
        while done < 1000 && attempts < 200 {
            attempts += 1;
            let positive = attempts % 2 == 1;
            let set = if positive { positive_orthonormal_set(space, &mut rng, 8) } else { signed_orthonormal_set(space, &mut rng, 8) };
            let Some(set) = set.unwrap() else { continue };
            for _ in 0..50 {
                let alpha: Vec<f64> = (0..set.len())
                    .map(|_| match rng.gen_range(0..10) {
                        0 | 1 => 0.0,
                        2 | 3 | 4 => -rng.gen_range(0.05..2.0),
                        _ => rng.gen_range(0.05..2.0),
                    })
                    .collect();
                let x = set.iter().zip(&alpha).fold(Vector::zeros(space.dim), |acc, (u, &a)| acc.axpy(a, u));
                worst = worst.max((norm(space, &x).unwrap() - space.p_class.lp_norm(&alpha)).abs());
                if positive {
                    let inside = cone_contains(&space.cone, &x, 1e-12).unwrap();
                    mismatches += usize::from(inside != alpha.iter().all(|&a| a >= 0.0));
                }
                done += 1;
            }
        }
        if done > 0 {
            covered.push(format!("{} {done}", f.name));
        }
        if done > 0 && done < 1000 {
            mismatches += 1;
        }
    }
    (worst <= 1e-9 && mismatches == 0 && !covered.is_empty(), format!("max error {worst:e}, {mismatches} order mismatches, elements: {}", covered.join(", ")))
}

/// Solves a small square system by partial pivoting; None when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Best vertex of `{rows · x (<=|>=|=) rhs}` by enumeration; None when no vertex is feasible.
fn brute_force(objective: &[f64], rows: &[(Vec<f64>, f64, i8)]) -> Option<f64> {
    let n = objective.len();
    let feasible = |x: &[f64]| {
        rows.iter().all(|(a, b, sense)| {
            let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            let slack = 1e-9 * (1.0 + b.abs());
            match sense {
                -1 => lhs <= b + slack,
                1 => lhs >= b - slack,
                _ => (lhs - b).abs() <= slack,
            }
        })
    };
    combinations(rows.len(), n)
        .into_iter()
        .filter_map(|active| solve_square(active.iter().map(|&i| rows[i].0.clone()).collect(), active.iter().map(|&i| rows[i].1).collect()))
        .filter(|x| feasible(x))
        .map(|x| objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>())
        .max_by(f64::total_cmp)
}

fn lp_kernel() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let maximize = rng.gen_bool(0.5);
        let mut problem = if maximize { LpProblem::maximize(Vector::from(c.clone())) } else { LpProblem::minimize(Vector::from(c.clone())) };
        // every variable lives in a box, so the region is bounded, and every row
        // holds at `anchor`, so it is nonempty
        let anchor: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut rows: Vec<(Vec<f64>, f64, i8)> = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let lo = anchor[i] - rng.gen_range(0.0..2.0);
            let hi = anchor[i] + rng.gen_range(0.0..3.0);
            problem = problem.lower_bound(i, lo).le(Vector::from(e.clone()), hi);
            rows.push((e.clone(), lo, 1));
            rows.push((e, hi, -1));
        }
        for _ in 0..rng.gen_range(1..=5) {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let at_anchor: f64 = a.iter().zip(&anchor).map(|(p, q)| p * q).sum();
            let sense = match rng.gen_range(0..10) {
                0 => 0,
                1 | 2 | 3 => 1,
                _ => -1,
            };
            let b = at_anchor - f64::from(sense) * rng.gen_range(0.0..1.0);
            problem = match sense {
                -1 => problem.le(Vector::from(a.clone()), b),
                1 => problem.ge(Vector::from(a.clone()), b),
                _ => problem.eq(Vector::from(a.clone()), b),
            };
            rows.push((a, b, sense));
        }
        // minimisation is stored as maximising -c, and the optimum is reported in that form
        let signed: Vec<f64> = if maximize { c.clone() } else { c.iter().map(|v| -v).collect() };
        let expected = brute_force(&signed, &rows);
        let got = solve_lp(&problem).unwrap();
        let agree = match (&got, expected) {
            (LpOutcome::Optimal { optimum, .. }, Some(e)) => (optimum - e).abs() <= 1e-8 * (1.0 + e.abs()),
            _ => false,
        };
        mismatches += usize::from(!agree);
    }
    (mismatches == 0, format!("{mismatches} mismatches in 200"))
}

fn verify_all() -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_orthospace")).args(["verify", "all", "--seed", "0"]).output().expect("binary runs");
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    let n = reports.as_array().map_or(0, |a| a.len());
    (out.status.code() == Some(0), format!("exit {:?}, {n} reports", out.status.code()))
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let lines = [
        timed("example_grid_n2049", Some(s(1)), example),
        timed("oracle_equivalence", Some(s(5)), oracle_equivalence),
        timed("thm33_three_way", Some(s(30)), equivalence),
        timed("prop32_positive_support", None, supports),
        timed("thm44_pipeline", None, duality),
        timed("lem27_lem28_cor35", None, lemmas),
        timed("embedding_isometry", None, embedding),
        timed("lp_vs_vertex_enumeration", None, lp_kernel),
        timed("verify_all_defaults", Some(s(60)), verify_all),
    ];
    println!();
    for l in &lines {
        println!("{} {:<26} {:>9.1} ms  {}", if l.ok { "PASS" } else { "FAIL" }, l.name, l.elapsed.as_secs_f64() * 1e3, l.detail);
    }
    let failed: Vec<&str> = lines.iter().filter(|l| !l.ok).map(|l| l.name).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
