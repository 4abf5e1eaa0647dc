//! JSON space specification files.
//!
//! ```json
//! {"dim": 2, "cone": {"kind": "nonneg"}, "norm": {"kind": "lp", "p": 2.0}, "p_class": 2.0}
//! ```
//!
//! Exponents are numbers or the string `"inf"`. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::cones::{ConeKind, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::spaces::{Exponent, NormKind, SpaceSpec};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    dim: usize,
    cone: ConeFile,
    norm: NormFile,
    p_class: ExponentFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ConeFile {
    Nonneg {},
    Rays { generators: Vec<Vec<f64>> },
    Psd { side: usize },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum NormFile {
    Lp {
        p: ExponentFile,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Sup {},
    OrderUnit { e: Vec<f64> },
    Base { phi: Vec<f64> },
    Spectral {},
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentFile {
    Number(f64),
    Text(String),
}

impl ExponentFile {
    fn parse(&self, field: &str) -> Result<Exponent> {
        match self {
            ExponentFile::Number(p) => Exponent::new(*p).map_err(|_| Error::input(format!("{field}: invalid exponent {p}, need p >= 1 or \"inf\""))),
            ExponentFile::Text(s) if s == "inf" => Ok(Exponent::Infinity),
            ExponentFile::Text(s) => Err(Error::input(format!("{field}: invalid exponent {s:?}, need p >= 1 or \"inf\""))),
        }
    }

    fn from_exponent(p: Exponent) -> Self {
        match p {
            Exponent::Infinity => ExponentFile::Text("inf".into()),
            Exponent::Finite(p) => ExponentFile::Number(p),
        }
    }
}

/// Parses and validates a space specification.
pub fn parse_space_spec(text: &str) -> Result<SpaceSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::input(format!("space spec: {e}")))?;
    let p_class = file.p_class.parse("p_class")?;
    let cone = match file.cone {
        ConeFile::Nonneg {} => ConeSpec::orthant(file.dim),
        ConeFile::Rays { generators } => ConeSpec::rays(generators.into_iter().map(Vector::from).collect()).map_err(|e| Error::input(format!("cone.generators: {e}")))?,
        ConeFile::Psd { side } => ConeSpec::psd(side),
    };
    let norm = match file.norm {
        NormFile::Lp { p, weights } => NormKind::Lp { p: p.parse("norm.p")?, weights: weights.map(Vector::from) },
        NormFile::Sup {} => NormKind::Sup,
        NormFile::OrderUnit { e } => NormKind::OrderUnit { e: Vector::from(e) },
        NormFile::Base { phi } => NormKind::Base { phi: Vector::from(phi) },
        NormFile::Spectral {} => NormKind::Spectral,
    };
    SpaceSpec::new(file.dim, cone, norm, p_class)
}

pub fn space_spec_to_json(space: &SpaceSpec) -> String {
    let cone = match &space.cone.kind {
        ConeKind::NonnegOrthant => ConeFile::Nonneg {},
        ConeKind::Rays(g) => ConeFile::Rays { generators: g.iter().map(|v| v.to_vec()).collect() },
        ConeKind::Psd { side } => ConeFile::Psd { side: *side },
    };
    let norm = match &space.norm {
        NormKind::Lp { p, weights } => NormFile::Lp { p: ExponentFile::from_exponent(*p), weights: weights.as_ref().map(|w| w.to_vec()) },
        NormKind::Sup => NormFile::Sup {},
        NormKind::OrderUnit { e } => NormFile::OrderUnit { e: e.to_vec() },
        NormKind::Base { phi } => NormFile::Base { phi: phi.to_vec() },
        NormKind::Spectral => NormFile::Spectral {},
    };
    let file = SpecFile { dim: space.dim, cone, norm, p_class: ExponentFile::from_exponent(space.p_class) };
    serde_json::to_string(&file).expect("spec serialises")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::default_families;
    use proptest::prelude::*;

    #[test]
    fn minimal_spec() {
        let s = parse_space_spec(r#"{"dim":2,"cone":{"kind":"nonneg"},"norm":{"kind":"lp","p":2.0},"p_class":2.0}"#).unwrap();
        assert_eq!(s, SpaceSpec::lp(2, Exponent::TWO));
    }

    #[test]
    fn infinity_as_string() {
        let s = parse_space_spec(r#"{"dim":3,"cone":{"kind":"nonneg"},"norm":{"kind":"lp","p":"inf"},"p_class":"inf"}"#).unwrap();
        assert_eq!(s, SpaceSpec::lp(3, Exponent::Infinity));
    }

    #[test]
    fn diagnostics() {
        let err = |t: &str| parse_space_spec(t).unwrap_err().to_string();
        let e = err(r#"{"dim":2,"cone":{"kind":"nonneg"},"norm":{"kind":"lp","p":0.5},"p_class":2.0}"#);
        assert!(e.contains("invalid exponent") && e.contains("norm.p"), "{e}");
        let e = err(r#"{"dim":2,"cone":{"kind":"rays","generators":[[1,0],[-1,0]]},"norm":{"kind":"sup"},"p_class":"inf"}"#);
        assert!(e.contains("cone not proper"), "{e}");
        let e = err(r#"{"dim":2,"cone":{"kind":"nonneg"},"norm":{"kind":"order_unit","e":[1,0]},"p_class":"inf"}"#);
        assert!(e.contains("order unit not interior"), "{e}");
        let e = err(r#"{"dim":2,"cone":{"kind":"nonneg"},"norm":{"kind":"sup"},"p_class":"inf","extra":1}"#);
        assert!(e.contains("unknown field"), "{e}");
        let e = err(r#"{"dim":2,"cone":{"kind":"nonneg","side":2},"norm":{"kind":"sup"},"p_class":"inf"}"#);
        assert!(e.contains("unknown field"), "{e}");
        let e = err(r#"{"dim":2,"cone":{"kind":"nonneg"},"norm":{"kind":"sup"},"p_class":"big"}"#);
        assert!(e.contains("p_class") && e.contains("invalid exponent"), "{e}");
    }

    #[test]
    fn defaults_round_trip() {
        for f in default_families() {
            assert_eq!(parse_space_spec(&space_spec_to_json(&f.space)).unwrap(), f.space, "{}", f.name);
        }
    }

    fn arb_space() -> impl Strategy<Value = SpaceSpec> {
        let lp = (1usize..6, prop_oneof![(1.0f64..8.0).prop_map(Exponent::Finite), Just(Exponent::Infinity)], proptest::option::of(proptest::collection::vec(0.1f64..10.0, 6)))
            .prop_map(|(n, p, w)| SpaceSpec::new(n, ConeSpec::orthant(n), NormKind::Lp { p, weights: w.map(|w| Vector::from(w[..n].to_vec())) }, p).unwrap());
        let ou = proptest::collection::vec(0.1f64..10.0, 1..6).prop_map(|e| SpaceSpec::order_unit(ConeSpec::orthant(e.len()), Vector::from(e)).unwrap());
        let base = proptest::collection::vec(0.1f64..10.0, 1..6).prop_map(|phi| SpaceSpec::base(ConeSpec::orthant(phi.len()), Vector::from(phi)).unwrap());
        prop_oneof![lp, ou, base, (1usize..4).prop_map(SpaceSpec::spectral)]
    }

    proptest! {
        #[test]
        fn round_trip(space in arb_space()) {
            prop_assert_eq!(parse_space_spec(&space_spec_to_json(&space)).unwrap(), space);
        }
    }
}
