//! JSON file formats for models, connections and metrics.
//!
//! All indices in files are 1-based. Metric and connection files use chart
//! coordinates in the order `(x_1 .. x_m, y_1 .. y_m)` for cotangent-bundle
//! metrics, so exponent vectors list base exponents before fiber exponents.
//!
//! * Model: `{"dimension": m, "components": [{"i","j","k","l","value"}]}`;
//!   unlisted components are zero and no symmetry is imposed.
//! * Connection: `{"dimension": m, "christoffel": [{"i","j","k","poly": [{"coeff","exps"}]}]}`;
//!   the symmetric symbol `(j, i, k)` is filled in from `(i, j, k)`.
//! * Metric: `{"dimension": n, "signature": {"negative": p, "positive": q},
//!   "metric": [{"i","j","poly","denominator"?}]}`; `(j, i)` is filled in from `(i, j)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::connection::AffineConnection;
use crate::error::{Error, Result};
use crate::metric::PseudoMetric;
use crate::model::AffineCurvatureModel;
use crate::poly::{Polynomial, RationalFunction, Term};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dimension: usize,
    pub components: Vec<ComponentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChristoffelEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub poly: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionFile {
    pub dimension: usize,
    pub christoffel: Vec<ChristoffelEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signature {
    pub negative: usize,
    pub positive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricEntry {
    pub i: usize,
    pub j: usize,
    pub poly: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<Vec<Term>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricFile {
    pub dimension: usize,
    pub signature: Signature,
    pub metric: Vec<MetricEntry>,
}

/// Any of the three loadable objects.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Model(AffineCurvatureModel),
    Connection(AffineConnection),
    Metric(PseudoMetric),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Model(_) => "model",
            Document::Connection(_) => "connection",
            Document::Metric(_) => "metric",
        }
    }
}

fn check_index(name: &str, entry: usize, idx: usize, dim: usize) -> Result<usize> {
    if idx == 0 || idx > dim {
        return Err(Error::invalid(format!(
            "entry {entry}: index {name} = {idx} outside 1..={dim}"
        )));
    }
    Ok(idx - 1)
}

fn check_dimension(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    Ok(())
}

pub fn model_from_file(f: &ModelFile) -> Result<AffineCurvatureModel> {
    let m = f.dimension;
    check_dimension(m)?;
    let mut seen: BTreeMap<[usize; 4], f64> = BTreeMap::new();
    let mut a = AffineCurvatureModel::zeros(m);
    for (n, c) in f.components.iter().enumerate() {
        let idx = [
            check_index("i", n + 1, c.i, m)?,
            check_index("j", n + 1, c.j, m)?,
            check_index("k", n + 1, c.k, m)?,
            check_index("l", n + 1, c.l, m)?,
        ];
        if !c.value.is_finite() {
            return Err(Error::invalid(format!("entry {}: non-finite value", n + 1)));
        }
        if let Some(&old) = seen.get(&idx) {
            if old != c.value {
                return Err(Error::invalid(format!(
                    "entry {}: conflicting duplicate component ({},{},{},{})",
                    n + 1,
                    c.i,
                    c.j,
                    c.k,
                    c.l
                )));
            }
            continue;
        }
        seen.insert(idx, c.value);
        a.set(idx[0], idx[1], idx[2], idx[3], c.value);
    }
    Ok(a)
}

pub fn model_to_file(a: &AffineCurvatureModel) -> ModelFile {
    let m = a.dim();
    let mut components = Vec::new();
    for (s, &v) in a.components().iter().enumerate() {
        if v != 0.0 {
            components.push(ComponentEntry {
                i: s / (m * m * m) + 1,
                j: (s / (m * m)) % m + 1,
                k: (s / m) % m + 1,
                l: s % m + 1,
                value: v,
            });
        }
    }
    ModelFile {
        dimension: m,
        components,
    }
}

pub fn connection_from_file(f: &ConnectionFile) -> Result<AffineConnection> {
    let m = f.dimension;
    check_dimension(m)?;
    let mut given: BTreeMap<(usize, usize, usize), Polynomial> = BTreeMap::new();
    for (n, e) in f.christoffel.iter().enumerate() {
        let i = check_index("i", n + 1, e.i, m)?;
        let j = check_index("j", n + 1, e.j, m)?;
        let k = check_index("k", n + 1, e.k, m)?;
        let p = Polynomial::from_terms(m, &e.poly)
            .map_err(|err| Error::invalid(format!("entry {}: {err}", n + 1)))?;
        let key = (i.min(j), i.max(j), k);
        if let Some(old) = given.get(&key) {
            if *old != p {
                return Err(Error::invalid(format!(
                    "entry {}: conflicting duplicate for symbol ({},{},{})",
                    n + 1,
                    e.i,
                    e.j,
                    e.k
                )));
            }
            continue;
        }
        given.insert(key, p);
    }
    let mut c = AffineConnection::flat(m);
    for ((i, j, k), p) in given {
        c.set_symmetric(i, j, k, p);
    }
    Ok(c)
}

pub fn connection_to_file(c: &AffineConnection) -> ConnectionFile {
    let m = c.dim();
    let mut christoffel = Vec::new();
    for i in 0..m {
        for j in i..m {
            for k in 0..m {
                let p = c.gamma(i, j, k);
                if !p.is_zero() {
                    christoffel.push(ChristoffelEntry {
                        i: i + 1,
                        j: j + 1,
                        k: k + 1,
                        poly: p.to_terms(),
                    });
                }
            }
        }
    }
    ConnectionFile {
        dimension: m,
        christoffel,
    }
}

pub fn metric_from_file(f: &MetricFile) -> Result<PseudoMetric> {
    let n = f.dimension;
    check_dimension(n)?;
    let mut given: BTreeMap<(usize, usize), RationalFunction> = BTreeMap::new();
    for (e_no, e) in f.metric.iter().enumerate() {
        let i = check_index("i", e_no + 1, e.i, n)?;
        let j = check_index("j", e_no + 1, e.j, n)?;
        let wrap = |err: Error| Error::invalid(format!("entry {}: {err}", e_no + 1));
        let numerator = Polynomial::from_terms(n, &e.poly).map_err(wrap)?;
        let denominator = e
            .denominator
            .as_ref()
            .map(|d| Polynomial::from_terms(n, d))
            .transpose()
            .map_err(wrap)?;
        if denominator.as_ref().is_some_and(|d| d.is_zero()) {
            return Err(Error::invalid(format!(
                "entry {}: zero denominator",
                e_no + 1
            )));
        }
        let r = RationalFunction {
            numerator,
            denominator,
        };
        let key = (i.min(j), i.max(j));
        if let Some(old) = given.get(&key) {
            if *old != r {
                return Err(Error::invalid(format!(
                    "entry {}: conflicting duplicate for component ({},{})",
                    e_no + 1,
                    e.i,
                    e.j
                )));
            }
            continue;
        }
        given.insert(key, r);
    }
    let mut g = vec![RationalFunction::polynomial(Polynomial::zero(n)); n * n];
    for ((i, j), r) in given {
        g[i * n + j] = r.clone();
        g[j * n + i] = r;
    }
    PseudoMetric::new(n, g, f.signature.negative, f.signature.positive)
}

pub fn metric_to_file(g: &PseudoMetric) -> MetricFile {
    let n = g.dim();
    let (negative, positive) = g.signature();
    let mut metric = Vec::new();
    for i in 0..n {
        for j in i..n {
            let r = g.component(i, j);
            if !r.is_zero() {
                metric.push(MetricEntry {
                    i: i + 1,
                    j: j + 1,
                    poly: r.numerator.to_terms(),
                    denominator: r.denominator.as_ref().map(|d| d.to_terms()),
                });
            }
        }
    }
    MetricFile {
        dimension: n,
        signature: Signature { negative, positive },
        metric,
    }
}

/// Parses any of the three formats, chosen by which component list is present.
/// Syntax and schema errors carry the line and column of the offending input.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let has = |k: &str| value.get(k).is_some();
    if has("components") {
        Ok(Document::Model(model_from_file(&serde_json::from_str(
            text,
        )?)?))
    } else if has("christoffel") {
        Ok(Document::Connection(connection_from_file(
            &serde_json::from_str(text)?,
        )?))
    } else if has("metric") {
        Ok(Document::Metric(metric_from_file(&serde_json::from_str(
            text,
        )?)?))
    } else {
        Err(Error::invalid(
            "unrecognized document: expected a \"components\", \"christoffel\" or \"metric\" list",
        ))
    }
}

/// Pretty JSON for a document.
pub fn document_to_json(doc: &Document) -> String {
    let s = match doc {
        Document::Model(a) => serde_json::to_string_pretty(&model_to_file(a)),
        Document::Connection(c) => serde_json::to_string_pretty(&connection_to_file(c)),
        Document::Metric(g) => serde_json::to_string_pretty(&metric_to_file(g)),
    };
    s.expect("file structs always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_m_eps_connection, build_m_eps_model, build_product_sphere_metric};

    #[test]
    fn round_trips() {
        for doc in [
            Document::Model(build_m_eps_model(3, 1.0).unwrap()),
            Document::Connection(build_m_eps_connection(3, 2.0).unwrap()),
            Document::Metric(build_product_sphere_metric(1, 2).unwrap()),
        ] {
            assert_eq!(parse_document(&document_to_json(&doc)).unwrap(), doc);
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err =
            parse_document("{\n  \"dimension\": 2,\n  \"components\": [ oops ]\n}").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn conflicting_christoffel_duplicates_are_rejected() {
        let text = r#"{"dimension": 2, "christoffel": [
            {"i": 1, "j": 2, "k": 1, "poly": [{"coeff": 1.0, "exps": [0, 0]}]},
            {"i": 2, "j": 1, "k": 1, "poly": [{"coeff": 2.0, "exps": [0, 0]}]}]}"#;
        assert!(parse_document(text).is_err());
        let same = text.replace("2.0", "1.0");
        let Document::Connection(c) = parse_document(&same).unwrap() else {
            panic!("expected a connection")
        };
        assert_eq!(c.gamma(0, 1, 0), c.gamma(1, 0, 0));
    }

    #[test]
    fn out_of_range_index() {
        let text =
            r#"{"dimension": 2, "components": [{"i": 3, "j": 1, "k": 1, "l": 1, "value": 1.0}]}"#;
        assert!(matches!(parse_document(text), Err(Error::InvalidInput(_))));
    }
}
