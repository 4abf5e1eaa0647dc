use criterion::{black_box, criterion_group, criterion_main, Criterion};
use orthospace::decomp::{infty_orth_decompose, opt_decompose};
use orthospace::harness::default_families;
use orthospace::linalg::{eigen_sym, solve_lp, LpProblem};
use orthospace::ortho::{p_orthogonal_numeric, OrthoConfig};
use orthospace::spaces::{norm, Exponent, SpaceSpec};
use orthospace::Vector;

criterion_group!(benches, lp, norms, decider, decompose);
criterion_main!(benches);

fn v(x: &[f64]) -> Vector {
    Vector::from(x.to_vec())
}

fn lp(c: &mut Criterion) {
    // max sum x subject to a staircase of pairwise caps
    let n = 8;
    let mut problem = LpProblem::maximize(v(&vec![1.0; n])).nonneg();
    for i in 0..n - 1 {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        row[i + 1] = 2.0;
        problem = problem.le(v(&row), 1.0 + i as f64);
    }
    problem = problem.le(v(&vec![1.0; n]), 10.0);
    c.bench_function("lp_staircase_8", |b| b.iter(|| solve_lp(black_box(&problem)).unwrap()));
}

fn norms(c: &mut Criterion) {
    let x = v(&[0.3, -1.2, 0.8, 0.1, -0.4, 2.0, 0.0, 0.7]);
    for family in default_families() {
        if family.space.dim != x.len() {
            continue;
        }
        c.bench_function(&format!("norm_{}", family.name), |b| b.iter(|| norm(&family.space, black_box(&x)).unwrap()));
    }
    let spectral = SpaceSpec::spectral(4);
    let m = v(&[2.0, 0.5, 0.0, 0.1, 0.5, 1.0, 0.3, 0.0, 0.0, 0.3, -1.0, 0.2, 0.1, 0.0, 0.2, 0.5]);
    c.bench_function("norm_spectral_4", |b| b.iter(|| norm(&spectral, black_box(&m)).unwrap()));
    let sym = orthospace::cones::as_symmetric(&m).unwrap();
    c.bench_function("jacobi_4x4", |b| b.iter(|| eigen_sym(black_box(&sym)).unwrap()));
}

fn decider(c: &mut Criterion) {
    let cfg = OrthoConfig::default();
    let x = v(&[1.0, 0.0, 2.0, 0.0, 0.5, 0.0, 0.0, 1.0]);
    let y = v(&[0.0, 3.0, 0.0, 1.0, 0.0, 0.2, 0.0, 0.0]);
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
        let space = SpaceSpec::lp(8, p);
        c.bench_function(&format!("decider_l{p}_8"), |b| b.iter(|| p_orthogonal_numeric(&space, black_box(&x), black_box(&y), p, &cfg).unwrap()));
    }
}

fn decompose(c: &mut Criterion) {
    let sup = SpaceSpec::sup(8);
    let w = v(&[3.0, -2.0, 0.5, -0.5, 1.0, 0.0, -1.5, 1.0]);
    c.bench_function("infty_decompose_sup_8", |b| b.iter(|| infty_orth_decompose(&sup, black_box(&w)).unwrap()));
    let l2 = SpaceSpec::lp(8, Exponent::Finite(2.0));
    c.bench_function("opt_decompose_l2_8", |b| b.iter(|| opt_decompose(&l2, black_box(&w), Exponent::Finite(2.0), 1e-6).unwrap()));
}
