mod common;

use orthospace::linalg::{eigen_sym, rank, solve_lp, LpProblem, Matrix, Vector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.gen_range(1..=4);
        let lp = common::random_bounded_lp(&mut rng, n);
        let expected = common::vertex_enumeration(&lp.c, &lp.rows, &lp.rhs).expect("origin is a vertex");
        let mut problem = LpProblem::maximize(Vector::from(lp.c.clone()));
        for (r, h) in lp.rows.iter().zip(&lp.rhs) {
            problem = problem.le(Vector::from(r.clone()), *h);
        }
        let (opt, arg) = solve_lp(&problem).unwrap().into_optimal("random").unwrap();
        assert!((opt - expected).abs() <= 1e-8, "{opt} vs {expected}");
        assert!(problem.max_violation(&arg) <= 1e-9);
    }
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let x = rng.gen_range(-5.0..5.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

fn det(m: &Matrix) -> f64 {
    match m.side() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)]) - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => unreachable!(),
    }
}

#[test]
fn eigen_invariants_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let m = random_symmetric(&mut rng, n);
        let d = eigen_sym(&m).unwrap();
        let scale = 1.0 + m.max_abs();
        assert!(d.reconstruct().add_scaled(-1.0, &m).max_abs() <= 1e-9 * scale);
        for i in 0..n {
            for j in 0..n {
                let ip = d.eigenvectors[i].dot(&d.eigenvectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() <= 1e-9);
            }
        }
        let sum: f64 = d.eigenvalues.iter().sum();
        assert!((sum - m.trace()).abs() <= 1e-9 * (1.0 + m.trace().abs().max(m.frobenius())));
        assert!(d.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        if n <= 3 {
            let prod: f64 = d.eigenvalues.iter().product();
            let dt = det(&m);
            assert!((prod - dt).abs() <= 1e-8 * (1.0 + dt.abs().max(m.frobenius().powi(n as i32))));
        }
    }
}

proptest! {
    #[test]
    fn rank_never_exceeds_dimensions(rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..6)) {
        let vs: Vec<Vector> = rows.into_iter().map(Vector::from).collect();
        let r = rank(&vs, 1e-10);
        prop_assert!(r <= vs.len().min(4));
    }
}
