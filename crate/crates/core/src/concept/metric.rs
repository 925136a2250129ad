use std::collections::HashMap;

use serde::Serialize;

use super::{Concept, FeatureMatrix, Payload, NULL_ID};
use crate::error::{Error, Result};

/// A distance between concepts of one concept space, including its
/// nullconcept.
///
/// Implementations must be non-negative and symmetric with `d(x, x) = 0`.
/// Metrics for which `d(x, y) = 0` does not imply `x = y` report
/// [`is_pseudo`](DistanceMetric::is_pseudo).
pub trait DistanceMetric {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64>;

    fn is_pseudo(&self) -> bool {
        false
    }

    /// Distance of `x` to the nullconcept.
    fn to_null(&self, x: &Concept) -> Result<f64> {
        self.distance(x, &Concept::null())
    }
}

impl<M: DistanceMetric + ?Sized> DistanceMetric for &M {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        (**self).distance(a, b)
    }

    fn is_pseudo(&self) -> bool {
        (**self).is_pseudo()
    }

    fn to_null(&self, x: &Concept) -> Result<f64> {
        (**self).to_null(x)
    }
}

/// Squares every distance of the wrapped metric.
#[derive(Debug, Clone, Copy)]
pub struct Squared<M>(pub M);

impl<M: DistanceMetric> DistanceMetric for Squared<M> {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        let d = self.0.distance(a, b)?;
        Ok(d * d)
    }

    fn is_pseudo(&self) -> bool {
        self.0.is_pseudo()
    }

    fn to_null(&self, x: &Concept) -> Result<f64> {
        let d = self.0.to_null(x)?;
        Ok(d * d)
    }
}

fn check_dims(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(())
}

fn norm(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn euclidean_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    Ok(u.iter()
        .zip(v)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// `1 - cos(u, v)`, with `d(u, 0) = 1` for nonzero `u` and `d(0, 0) = 0`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    if u == v {
        return Ok(0.0);
    }
    let (nu, nv) = (norm(u), norm(v));
    match (nu == 0.0, nv == 0.0) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(1.0),
        _ => {}
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let sim = (dot / (nu * nv)).clamp(-1.0, 1.0);
    Ok(1.0 - sim)
}

/// Euclidean distance between two time-series matrices after padding the
/// shorter one with zero rows at the end.
pub fn matrix_distance(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<f64> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            left: a.cols(),
            right: b.cols(),
        });
    }
    let cols = a.cols();
    let (long, short) = if a.rows() >= b.rows() { (a, b) } else { (b, a) };
    let shared = short.rows() * cols;
    let head: f64 = long.as_slice()[..shared]
        .iter()
        .zip(&short.as_slice()[..shared])
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let tail: f64 = long.as_slice()[shared..].iter().map(|x| x * x).sum();
    Ok((head + tail).sqrt())
}

fn kind(p: &Payload) -> &'static str {
    match p {
        Payload::Symbol(_) => "symbol",
        Payload::Vector(_) => "vector",
        Payload::Matrix(_) => "matrix",
    }
}

fn vector_of(c: &Concept) -> Result<&[f64]> {
    match &c.payload {
        Payload::Vector(v) => Ok(v),
        other => Err(Error::IncomparablePayloads(format!(
            "`{}` is a {}, expected a vector",
            c.id,
            kind(other)
        ))),
    }
}

fn matrix_of(c: &Concept) -> Result<&FeatureMatrix> {
    match &c.payload {
        Payload::Matrix(m) => Ok(m),
        other => Err(Error::IncomparablePayloads(format!(
            "`{}` is a {}, expected a matrix",
            c.id,
            kind(other)
        ))),
    }
}

/// Euclidean distance on vector concepts; the nullconcept is the zero vector.
#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanMetric;

impl DistanceMetric for EuclideanMetric {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        match (a.is_null, b.is_null) {
            (true, true) => Ok(0.0),
            (true, false) => Ok(norm(vector_of(b)?)),
            (false, true) => Ok(norm(vector_of(a)?)),
            (false, false) => euclidean_distance(vector_of(a)?, vector_of(b)?),
        }
    }
}

/// Cosine distance on vector concepts.
///
/// Every concept is at distance 1 from the nullconcept. Parallel vectors are
/// at distance 0, so this is a pseudo-metric.
#[derive(Debug, Clone, Copy, Default)]
pub struct CosineMetric;

impl DistanceMetric for CosineMetric {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        match (a.is_null, b.is_null) {
            (true, true) => Ok(0.0),
            (true, false) | (false, true) => Ok(1.0),
            (false, false) => cosine_distance(vector_of(a)?, vector_of(b)?),
        }
    }

    fn is_pseudo(&self) -> bool {
        true
    }
}

/// Padded matrix distance on matrix concepts; the nullconcept is an
/// all-zero matrix.
#[derive(Debug, Clone, Copy, Default)]
pub struct MatrixMetric;

impl DistanceMetric for MatrixMetric {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        match (a.is_null, b.is_null) {
            (true, true) => Ok(0.0),
            (true, false) => Ok(matrix_of(b)?.frobenius_norm()),
            (false, true) => Ok(matrix_of(a)?.frobenius_norm()),
            (false, false) => matrix_distance(matrix_of(a)?, matrix_of(b)?),
        }
    }
}

/// `d(x, y) = 0` for equal payloads, 1 otherwise; every concept is at
/// distance 1 from the nullconcept.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiscreteMetric;

impl DistanceMetric for DiscreteMetric {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        Ok(if a.same_payload(b) { 0.0 } else { 1.0 })
    }
}

/// Explicit distance table keyed by concept id. The nullconcept is looked
/// up under [`NULL_ID`]. Values are taken as given, without validation.
#[derive(Debug, Clone, Default)]
pub struct TableMetric {
    table: HashMap<(String, String), f64>,
    pseudo: bool,
}

impl TableMetric {
    /// Builds a symmetric table from `(a, b, d)` entries.
    pub fn new<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str, f64)>) -> Self {
        let mut table = HashMap::new();
        for (a, b, d) in entries {
            table.insert((a.to_string(), b.to_string()), d);
            table.insert((b.to_string(), a.to_string()), d);
        }
        Self {
            table,
            pseudo: false,
        }
    }

    /// Overrides a single ordered entry, leaving its mirror untouched.
    pub fn set_directed(&mut self, a: &str, b: &str, d: f64) {
        self.table.insert((a.to_string(), b.to_string()), d);
    }

    pub fn with_pseudo(mut self, pseudo: bool) -> Self {
        self.pseudo = pseudo;
        self
    }
}

fn table_key(c: &Concept) -> &str {
    if c.is_null {
        NULL_ID
    } else {
        &c.id
    }
}

impl DistanceMetric for TableMetric {
    fn distance(&self, a: &Concept, b: &Concept) -> Result<f64> {
        let (ka, kb) = (table_key(a), table_key(b));
        if let Some(&d) = self.table.get(&(ka.to_string(), kb.to_string())) {
            return Ok(d);
        }
        if ka == kb {
            return Ok(0.0);
        }
        let missing = if self.table.keys().any(|(x, _)| x == ka) {
            kb
        } else {
            ka
        };
        Err(Error::UnknownConcept(missing.to_string()))
    }

    fn is_pseudo(&self) -> bool {
        self.pseudo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomViolation {
    Negative { a: String, b: String, value: f64 },
    Asymmetric { a: String, b: String, forward: f64, backward: f64 },
    SelfDistance { a: String, value: f64 },
    Indiscernible { a: String, b: String },
    Failed { a: String, b: String, message: String },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AxiomReport {
    pub pairs_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

const AXIOM_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= AXIOM_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Checks non-negativity, symmetry and `d(x, x) = 0` over all pairs of the
/// sample. Identity of indiscernibles is checked only for metrics that do
/// not declare themselves pseudo.
pub fn check_metric_axioms<M: DistanceMetric + ?Sized>(
    metric: &M,
    sample: &[Concept],
) -> AxiomReport {
    let mut report = AxiomReport::default();
    let label = |c: &Concept| {
        if c.is_null {
            NULL_ID.to_string()
        } else {
            c.id.clone()
        }
    };

    for (i, a) in sample.iter().enumerate() {
        for b in &sample[i..] {
            report.pairs_checked += 1;
            let forward = metric.distance(a, b);
            let backward = metric.distance(b, a);
            let (forward, backward) = match (forward, backward) {
                (Ok(f), Ok(g)) => (f, g),
                (Err(e), _) | (_, Err(e)) => {
                    report.violations.push(AxiomViolation::Failed {
                        a: label(a),
                        b: label(b),
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let same = a.same_payload(b);
            if same {
                if !close(forward, 0.0) {
                    report.violations.push(AxiomViolation::SelfDistance {
                        a: label(a),
                        value: forward,
                    });
                }
                continue;
            }
            for v in [forward, backward] {
                if v < 0.0 || !v.is_finite() {
                    report.violations.push(AxiomViolation::Negative {
                        a: label(a),
                        b: label(b),
                        value: v,
                    });
                    break;
                }
            }
            if !close(forward, backward) {
                report.violations.push(AxiomViolation::Asymmetric {
                    a: label(a),
                    b: label(b),
                    forward,
                    backward,
                });
            }
            if !metric.is_pseudo() && close(forward, 0.0) {
                report.violations.push(AxiomViolation::Indiscernible {
                    a: label(a),
                    b: label(b),
                });
            }
        }
    }
    report
}
