//! Concepts, products, and the distances between concepts.
//!
//! A [`Concept`] is an atomic building block (a Scratch block, an image, a
//! sound). A [`Product`] is a graph over concepts. Every concept space has a
//! neutral nullconcept; the distance of a concept to it encodes how much
//! knowledge the concept embodies.

mod metric;
mod network;

pub use metric::{
    check_metric_axioms, cosine_distance, euclidean_distance, matrix_distance, AxiomReport,
    AxiomViolation, CosineMetric, DiscreteMetric, DistanceMetric, EuclideanMetric, MatrixMetric,
    Squared, TableMetric,
};
pub use network::SemanticNetwork;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier used for the nullconcept when none is given.
pub const NULL_ID: &str = "0";

/// Dense row-major `rows x cols` matrix of finite reals.
///
/// Used for time-series features (one row per time step).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                left: bad.len(),
                right: cols,
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Appends zero rows at the end until the matrix has `rows` rows.
    pub fn padded(&self, rows: usize) -> Self {
        let mut data = self.data.clone();
        if rows > self.rows {
            data.resize(rows * self.cols, 0.0);
        }
        Self {
            rows: rows.max(self.rows),
            cols: self.cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// What a concept is made of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    Symbol(String),
    Vector(Vec<f64>),
    Matrix(FeatureMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub payload: Payload,
    pub is_null: bool,
}

impl Concept {
    /// The nullconcept `0`.
    pub fn null() -> Self {
        Self {
            id: NULL_ID.to_string(),
            payload: Payload::Symbol(NULL_ID.to_string()),
            is_null: true,
        }
    }

    /// A symbolic concept whose payload is its own id.
    pub fn symbol(id: impl Into<String>) -> Self {
        let id = id.into();
        Self {
            payload: Payload::Symbol(id.clone()),
            id,
            is_null: false,
        }
    }

    pub fn vector(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("vector concept `{id}`")));
        }
        Ok(Self {
            id,
            payload: Payload::Vector(values),
            is_null: false,
        })
    }

    pub fn matrix(id: impl Into<String>, matrix: FeatureMatrix) -> Self {
        Self {
            id: id.into(),
            payload: Payload::Matrix(matrix),
            is_null: false,
        }
    }

    /// Equality used for duplicate removal: same payload, same null flag.
    pub fn same_payload(&self, other: &Concept) -> bool {
        self.is_null == other.is_null && self.payload == other.payload
    }
}

/// A creative product: concepts (duplicates allowed) plus directed edges
/// between concept indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Product {
    concepts: Vec<Concept>,
    edges: Vec<(usize, usize)>,
}

impl Product {
    pub fn new(concepts: Vec<Concept>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(c) = concepts.iter().find(|c| c.is_null) {
            return Err(Error::InvalidProduct(format!(
                "nullconcept `{}` cannot be part of a product",
                c.id
            )));
        }
        for &(a, b) in &edges {
            if a >= concepts.len() || b >= concepts.len() {
                return Err(Error::InvalidProduct(format!(
                    "edge ({a}, {b}) out of range for {} concepts",
                    concepts.len()
                )));
            }
        }
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        Ok(Self { concepts, edges })
    }

    /// A product without edges.
    pub fn from_concepts(concepts: Vec<Concept>) -> Result<Self> {
        Self::new(concepts, Vec::new())
    }

    /// Symbolic product from a list of ids, handy for small worked examples.
    pub fn from_symbols<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            concepts: ids.into_iter().map(Concept::symbol).collect(),
            edges: Vec::new(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Concepts with payload duplicates removed, first occurrence kept.
    pub fn distinct_concepts(&self) -> Vec<&Concept> {
        let mut out: Vec<&Concept> = Vec::new();
        for c in &self.concepts {
            if !out.iter().any(|d| d.same_payload(c)) {
                out.push(c);
            }
        }
        out
    }
}
