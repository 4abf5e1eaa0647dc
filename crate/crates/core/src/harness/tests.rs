use super::*;
use crate::cones::{cone_contains, as_symmetric, ConeSpec};
use crate::linalg::{eigen_sym, Vector};

fn v(x: &[f64]) -> Vector {
    Vector::from(x.to_vec())
}

#[test]
fn suite_names_round_trip() {
    for id in SuiteId::ALL {
        assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
        assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.name()));
    }
    assert!("thm99".parse::<SuiteId>().is_err());
}

#[test]
fn cone_samples_are_members() {
    let rays = ConeSpec::rays(vec![v(&[1.0, 1.0]), v(&[1.0, -1.0])]).unwrap();
    let spaces = [
        SpaceSpec::lp(2, Exponent::Finite(2.0)),
        SpaceSpec::order_unit(rays, v(&[1.0, 0.0])).unwrap(),
        SpaceSpec::spectral(2),
    ];
    for space in &spaces {
        for seed in 0..20 {
            let x = sample_cone(space, seed);
            assert!(cone_contains(&space.cone, &x, 1e-12).unwrap(), "{x:?}");
        }
    }
    let psd = sample_cone(&SpaceSpec::spectral(2), 3);
    assert!(eigen_sym(&as_symmetric(&psd).unwrap()).unwrap().min_eigenvalue() >= -1e-12);
}

#[test]
fn equivalence_statements_on_sup_plane() {
    let space = SpaceSpec::sup(2);
    assert_eq!(thm33_statements(&space, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 1e-9).unwrap(), [true; 3]);
    assert_eq!(thm33_statements(&space, &v(&[1.0, 0.5]), &v(&[0.0, 1.0]), 1e-9).unwrap(), [false; 3]);
}

#[test]
fn reports_are_reproducible() {
    let space = SpaceSpec::sup(4);
    let a = run_suite(SuiteId::Thm33Equivalence, &space, 30, 1e-9, 5);
    let b = run_suite(SuiteId::Thm33Equivalence, &space, 30, 1e-9, 5);
    assert_eq!(a.without_timing().to_json(), b.without_timing().to_json());
    assert_eq!(a.passes + a.counterexamples.len(), a.samples);
    let c = run_suite(SuiteId::Thm33Equivalence, &space, 30, 1e-9, 6);
    assert_ne!(a.without_timing().to_json(), c.without_timing().to_json());
}

#[test]
fn unsupported_is_explicit() {
    let r = run_suite(SuiteId::Cor38OrderUnit, &SpaceSpec::lp(3, Exponent::Finite(2.0)), 10, 1e-9, 0);
    assert!(r.is_unsupported() && !r.passed());
    assert_eq!(r.samples, 0);
}

#[test]
fn lemma_pairs_in_euclidean_space() {
    let r = run_suite(SuiteId::Lem27PositivePair, &SpaceSpec::lp(4, Exponent::Finite(2.0)), 100, 1e-9, 0);
    assert_eq!(r.passes, 100, "{}", r.to_json());
}

#[test]
fn grid_example_suite() {
    let r = run_suite(SuiteId::Ex46Nonuniqueness, &SpaceSpec::sup(1), 1, 1e-9, 0);
    assert!(r.passed(), "{}", r.to_json());
    assert!((r.metrics["max_gap"] - 0.5).abs() <= 1e-12);
}

#[test]
fn every_suite_has_a_default_family() {
    for id in SuiteId::ALL {
        assert!(!run_on_defaults(id, 0, 1e-9, 0).is_empty(), "{id}");
    }
}
