//! Seeded property suites with serialisable reports.
//!
//! Every suite draws `samples` instances from a ChaCha8 stream keyed by
//! `(seed, suite)`, so reports are reproducible and independent of the order
//! in which suites run.

mod example46;
mod sample;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use example46::{build_example_46, certify_example_46, grid_space, Example46, Example46Certificate};
pub use sample::{
    default_families, l1_cone_4, orthogonal_pair, positive_orthonormal_set, positive_pair, sample_cone, sample_cone_with, sample_dual_cone, sample_face,
    sample_vector, signed_orthonormal_set, Family,
};
pub use suites::thm33_statements;

use crate::cones::ConeKind;
use crate::error::{Error, Result};
use crate::ortho::OrthoConfig;
use crate::spaces::{Exponent, NormKind, SpaceSpec};
use suites::{Ctx, Outcome};

pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const EXAMPLE_46_GRID: usize = 2049;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SuiteId {
    #[serde(rename = "thm21_lp_characterization")]
    Thm21LpCharacterization,
    #[serde(rename = "def22_Op1")]
    Def22Op1,
    #[serde(rename = "def22_Op2")]
    Def22Op2,
    #[serde(rename = "thm23_duality")]
    Thm23Duality,
    #[serde(rename = "thm24_OSp2")]
    Thm24OSp2,
    #[serde(rename = "prop25_span_smooth")]
    Prop25SpanSmooth,
    #[serde(rename = "thm26_order_iso")]
    Thm26OrderIso,
    #[serde(rename = "lem27_positive_pair")]
    Lem27PositivePair,
    #[serde(rename = "lem28_cone_coeffs")]
    Lem28ConeCoeffs,
    #[serde(rename = "prop32_supp_nonempty")]
    Prop32SuppNonempty,
    #[serde(rename = "thm33_equivalence")]
    Thm33Equivalence,
    #[serde(rename = "rem34_extension")]
    Rem34Extension,
    #[serde(rename = "cor35_infty_pair")]
    Cor35InftyPair,
    #[serde(rename = "thm36_c0")]
    Thm36C0,
    #[serde(rename = "cor38_order_unit")]
    Cor38OrderUnit,
    #[serde(rename = "cor310_crust")]
    Cor310Crust,
    #[serde(rename = "rem311_greatest")]
    Rem311Greatest,
    #[serde(rename = "thm41_one_orth")]
    Thm41OneOrth,
    #[serde(rename = "rem42_restriction")]
    Rem42Restriction,
    #[serde(rename = "lem43_base_orth")]
    Lem43BaseOrth,
    #[serde(rename = "thm44_duality")]
    Thm44Duality,
    #[serde(rename = "ex46_nonuniqueness")]
    Ex46Nonuniqueness,
}

impl SuiteId {
    pub const ALL: [SuiteId; 22] = [
        SuiteId::Thm21LpCharacterization,
        SuiteId::Def22Op1,
        SuiteId::Def22Op2,
        SuiteId::Thm23Duality,
        SuiteId::Thm24OSp2,
        SuiteId::Prop25SpanSmooth,
        SuiteId::Thm26OrderIso,
        SuiteId::Lem27PositivePair,
        SuiteId::Lem28ConeCoeffs,
        SuiteId::Prop32SuppNonempty,
        SuiteId::Thm33Equivalence,
        SuiteId::Rem34Extension,
        SuiteId::Cor35InftyPair,
        SuiteId::Thm36C0,
        SuiteId::Cor38OrderUnit,
        SuiteId::Cor310Crust,
        SuiteId::Rem311Greatest,
        SuiteId::Thm41OneOrth,
        SuiteId::Rem42Restriction,
        SuiteId::Lem43BaseOrth,
        SuiteId::Thm44Duality,
        SuiteId::Ex46Nonuniqueness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Thm21LpCharacterization => "thm21_lp_characterization",
            SuiteId::Def22Op1 => "def22_Op1",
            SuiteId::Def22Op2 => "def22_Op2",
            SuiteId::Thm23Duality => "thm23_duality",
            SuiteId::Thm24OSp2 => "thm24_OSp2",
            SuiteId::Prop25SpanSmooth => "prop25_span_smooth",
            SuiteId::Thm26OrderIso => "thm26_order_iso",
            SuiteId::Lem27PositivePair => "lem27_positive_pair",
            SuiteId::Lem28ConeCoeffs => "lem28_cone_coeffs",
            SuiteId::Prop32SuppNonempty => "prop32_supp_nonempty",
            SuiteId::Thm33Equivalence => "thm33_equivalence",
            SuiteId::Rem34Extension => "rem34_extension",
            SuiteId::Cor35InftyPair => "cor35_infty_pair",
            SuiteId::Thm36C0 => "thm36_c0",
            SuiteId::Cor38OrderUnit => "cor38_order_unit",
            SuiteId::Cor310Crust => "cor310_crust",
            SuiteId::Rem311Greatest => "rem311_greatest",
            SuiteId::Thm41OneOrth => "thm41_one_orth",
            SuiteId::Rem42Restriction => "rem42_restriction",
            SuiteId::Lem43BaseOrth => "lem43_base_orth",
            SuiteId::Thm44Duality => "thm44_duality",
            SuiteId::Ex46Nonuniqueness => "ex46_nonuniqueness",
        }
    }

    /// What the suite asserts, in one line.
    pub fn description(self) -> &'static str {
        match self {
            SuiteId::Thm21LpCharacterization => "orthonormal sets span an isometric lp copy and orthogonality is additive",
            SuiteId::Def22Op1 => "u <= v <= w implies ||v|| <= p-aggregate of ||u||, ||w||",
            SuiteId::Def22Op2 => "every v splits into positive parts with aggregate within epsilon of ||v||",
            SuiteId::Thm23Duality => "the dual satisfies both interval and decomposition conditions for p'",
            SuiteId::Thm24OSp2 => "dual decompositions attain the dual norm exactly",
            SuiteId::Prop25SpanSmooth => "the span of a positive orthonormal set is order smooth",
            SuiteId::Thm26OrderIso => "positive orthonormal sets embed isometrically and order-preservingly in lp",
            SuiteId::Lem27PositivePair => "orthogonal positive pairs never differ by a positive element (finite p)",
            SuiteId::Lem28ConeCoeffs => "span elements are positive iff all coefficients are",
            SuiteId::Prop32SuppNonempty => "positive elements have positive norm-one support functionals",
            SuiteId::Thm33Equivalence => "three characterisations of infinity-orthogonality agree on positive pairs",
            SuiteId::Rem34Extension => "support functionals of orthogonal pairs are 1-orthogonal",
            SuiteId::Cor35InftyPair => "orthogonal positive pairs never differ by a positive element (p = inf)",
            SuiteId::Thm36C0 => "positive orthonormal sets embed isometrically and order-preservingly in c0",
            SuiteId::Cor38OrderUnit => "infinity-orthogonality of positive pairs iff normalised sum <= e",
            SuiteId::Cor310Crust => "a crust exists iff an infinity-orthogonal partner exists",
            SuiteId::Rem311Greatest => "e - u dominates every norm-one orthogonal partner",
            SuiteId::Thm41OneOrth => "1-orthogonality with vanishing cross terms iff restricted supports are infinity-orthogonal",
            SuiteId::Rem42Restriction => "orthogonality of support functionals survives restriction to the span",
            SuiteId::Lem43BaseOrth => "vanishing cross terms force 1-orthogonality in base normed spaces",
            SuiteId::Thm44Duality => "dual functionals split into 1-orthogonal positive parts",
            SuiteId::Ex46Nonuniqueness => "cos on a grid has two different infinity-orthogonal decompositions",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| Error::input(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub input: Value,
    /// `None` when the instance failed with an error rather than a residual.
    pub residual: Option<f64>,
    pub location: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum SuiteStatus {
    Ran,
    Unsupported { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteId,
    pub space: String,
    pub samples: usize,
    pub passes: usize,
    pub counterexamples: Vec<Counterexample>,
    pub seed: u64,
    pub tolerance: f64,
    pub elapsed_ms: f64,
    pub version: String,
    pub status: SuiteStatus,
    pub metrics: BTreeMap<String, f64>,
}

impl SuiteReport {
    fn new(suite: SuiteId, space: String, seed: u64, tolerance: f64) -> Self {
        SuiteReport {
            suite,
            space,
            samples: 0,
            passes: 0,
            counterexamples: Vec::new(),
            seed,
            tolerance,
            elapsed_ms: 0.0,
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: SuiteStatus::Ran,
            metrics: BTreeMap::new(),
        }
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self.status, SuiteStatus::Unsupported { .. })
    }

    /// Ran and found nothing.
    pub fn passed(&self) -> bool {
        !self.is_unsupported() && self.counterexamples.is_empty()
    }

    /// The report with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> SuiteReport {
        SuiteReport { elapsed_ms: 0.0, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

fn is_coordinate(space: &SpaceSpec) -> bool {
    matches!(space.cone.kind, ConeKind::NonnegOrthant) && !matches!(space.norm, NormKind::Spectral)
}

fn is_base_like(space: &SpaceSpec) -> bool {
    match &space.norm {
        NormKind::Base { .. } => true,
        NormKind::Lp { p, .. } => matches!(space.cone.kind, ConeKind::NonnegOrthant) && *p == Exponent::ONE,
        _ => false,
    }
}

/// Why `suite` cannot run on `space`, if it cannot.
pub fn unsupported_reason(suite: SuiteId, space: &SpaceSpec) -> Option<String> {
    use SuiteId::*;
    let infinite = space.p_class.is_infinite();
    let order_unit = space.order_unit_element().is_some();
    let reason = match suite {
        Thm21LpCharacterization if !is_coordinate(space) => "needs a coordinate family (orthant cone, non-spectral norm)",
        Thm26OrderIso | Lem27PositivePair if infinite => "needs a finite exponent class",
        Thm36C0 | Cor35InftyPair | Thm33Equivalence | Rem34Extension if !infinite => "needs exponent class infinity",
        Cor38OrderUnit | Cor310Crust | Rem311Greatest if !(infinite && order_unit) => "needs an order unit family",
        Thm41OneOrth | Rem42Restriction if space.p_class != Exponent::ONE => "needs exponent class 1",
        Lem43BaseOrth if !is_base_like(space) => "needs a base norm",
        Thm44Duality if !(infinite && (matches!(space.cone.kind, ConeKind::NonnegOrthant) || matches!(space.norm, NormKind::Spectral | NormKind::OrderUnit { .. }))) => {
            "needs exponent class infinity with an orthant, spectral or order unit structure"
        }
        Thm26OrderIso | Thm36C0 | Prop25SpanSmooth | Lem28ConeCoeffs | Lem27PositivePair | Cor35InftyPair | Rem34Extension
            if matches!(space.cone.kind, ConeKind::Rays(_)) && !order_unit =>
        {
            "no orthogonal positive pairs can be generated for this ray cone"
        }
        _ => return None,
    };
    Some(reason.to_string())
}

type InstanceFn = fn(&mut Ctx, &mut ChaCha8Rng) -> Result<Outcome>;

fn instance_fn(suite: SuiteId) -> Option<InstanceFn> {
    use SuiteId::*;
    Some(match suite {
        Thm21LpCharacterization => suites::thm21,
        Def22Op1 => suites::def22_op1,
        Def22Op2 => suites::def22_op2,
        Thm23Duality => suites::thm23,
        Thm24OSp2 => suites::thm24,
        Prop25SpanSmooth => suites::prop25,
        Thm26OrderIso | Thm36C0 => suites::embedding,
        Lem27PositivePair | Cor35InftyPair => suites::positive_pair_difference,
        Lem28ConeCoeffs => suites::lem28,
        Prop32SuppNonempty => suites::prop32,
        Thm33Equivalence => suites::thm33,
        Rem34Extension => suites::rem34,
        Cor38OrderUnit => suites::cor38,
        Cor310Crust => suites::cor310,
        Rem311Greatest => suites::rem311,
        Thm41OneOrth => suites::thm41,
        Rem42Restriction => suites::rem42,
        Lem43BaseOrth => suites::lem43,
        Thm44Duality => suites::thm44,
        Ex46Nonuniqueness => return None,
    })
}

fn suite_rng(seed: u64, suite: SuiteId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = SuiteId::ALL.iter().position(|s| *s == suite).unwrap_or(0);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Runs `samples` instances of `suite` on `space`. Unsupported pairings give
/// a report with that status and zero samples. `ex46_nonuniqueness` ignores
/// `space` and uses the default grid.
pub fn run_suite(suite: SuiteId, space: &SpaceSpec, samples: usize, tol: f64, seed: u64) -> SuiteReport {
    if suite == SuiteId::Ex46Nonuniqueness {
        return run_example_46(EXAMPLE_46_GRID, tol.min(1e-12), seed);
    }
    let start = Instant::now();
    let mut report = SuiteReport::new(suite, space.describe(), seed, tol);
    if let Some(reason) = unsupported_reason(suite, space) {
        report.status = SuiteStatus::Unsupported { reason };
        return report;
    }
    let run = instance_fn(suite).expect("every sampled suite has an instance");
    let mut ctx = Ctx { space, tol, cfg: OrthoConfig::with_tol(tol), metrics: BTreeMap::new() };
    let mut rng = suite_rng(seed, suite);
    for i in 0..samples {
        match run(&mut ctx, &mut rng) {
            Ok(Outcome::Pass) => report.passes += 1,
            Ok(Outcome::Fail(c)) => report.counterexamples.push(c),
            Err(Error::Unsupported(reason)) if i == 0 => {
                report.status = SuiteStatus::Unsupported { reason };
                report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
                return report;
            }
            Err(e) => report.counterexamples.push(Counterexample { input: serde_json::json!({ "sample": i }), residual: None, location: format!("error: {e}") }),
        }
        report.samples += 1;
    }
    report.metrics = ctx.metrics;
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

/// Builds and certifies the grid example with `n` points.
pub fn run_example_46(n: usize, tol: f64, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport::new(SuiteId::Ex46Nonuniqueness, format!("sup-norm order unit grid, n = {n}"), seed, tol);
    report.samples = 1;
    let outcome = build_example_46(n).and_then(|ex| certify_example_46(&ex, tol));
    match outcome {
        Ok(c) => {
            let m = &mut report.metrics;
            m.insert("n".into(), n as f64);
            m.insert("max_gap".into(), c.max_gap);
            m.insert("residual_lattice".into(), c.residual_lattice);
            m.insert("residual_squares".into(), c.residual_squares);
            m.insert("norm_lattice_hat_sum".into(), c.norm_lattice_hat_sum);
            m.insert("norm_squares_hat_sum".into(), c.norm_squares_hat_sum);
            m.insert("norm_f_plus".into(), c.norm_f_plus);
            m.insert("norm_f_minus".into(), c.norm_f_minus);
            if c.passed(tol) {
                report.passes = 1;
            } else {
                let input = serde_json::to_value(&c).expect("certificate serialises");
                report.counterexamples.push(Counterexample { input, residual: Some((c.max_gap - 0.5).abs()), location: "example certificate failed".into() });
            }
        }
        Err(e) => report.counterexamples.push(Counterexample { input: serde_json::json!({ "n": n }), residual: None, location: format!("error: {e}") }),
    }
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

/// Runs `suite` on every default family that supports it (once for the grid example).
pub fn run_on_defaults(suite: SuiteId, samples: usize, tol: f64, seed: u64) -> Vec<SuiteReport> {
    if suite == SuiteId::Ex46Nonuniqueness {
        return vec![run_example_46(EXAMPLE_46_GRID, tol.min(1e-12), seed)];
    }
    default_families()
        .into_iter()
        .filter(|f| unsupported_reason(suite, &f.space).is_none())
        .map(|f| {
            let mut r = run_suite(suite, &f.space, samples, tol, seed);
            r.space = format!("{}: {}", f.name, r.space);
            r
        })
        .collect()
}

/// The full catalog on the default families.
pub fn run_all_defaults(samples: usize, tol: f64, seed: u64) -> Vec<SuiteReport> {
    SuiteId::ALL.iter().flat_map(|s| run_on_defaults(*s, samples, tol, seed)).collect()
}

#[cfg(test)]
mod tests;
