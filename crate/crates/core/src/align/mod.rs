//! Optimal alignments between products: Hungarian assignment, the
//! null-padded alignment distance, and its order-preserving restrictions
//! (tree and sequence edit distance).

mod hungarian;
mod sequence;
mod tree;

pub use hungarian::{hungarian, Assignment};
pub use sequence::sequence_edit_distance;
pub use tree::{forest_edit_distance, tree_edit_distance, LabeledTree};

use serde::Serialize;

use crate::concept::{DistanceMetric, Product};
use crate::error::{Error, Result};

/// One aligned pair. `None` stands for the nullconcept; `(None, None)`
/// never occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AlignedPair {
    pub left: Option<usize>,
    pub right: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
    pub cost: f64,
}

/// Cost of an explicit alignment between `s` and `t`.
///
/// Fails if some concept is not aligned exactly once or a pair is
/// `(None, None)`.
pub fn alignment_cost<M: DistanceMetric + ?Sized>(
    s: &Product,
    t: &Product,
    pairs: &[AlignedPair],
    metric: &M,
) -> Result<f64> {
    let mut left_seen = vec![0usize; s.len()];
    let mut right_seen = vec![0usize; t.len()];
    let mut cost = 0.0;
    for p in pairs {
        let d = match (p.left, p.right) {
            (None, None) => {
                return Err(Error::InvalidProduct("(null, null) pair in alignment".into()))
            }
            (Some(i), None) => metric.to_null(concept(s, i)?)?,
            (None, Some(j)) => metric.to_null(concept(t, j)?)?,
            (Some(i), Some(j)) => metric.distance(concept(s, i)?, concept(t, j)?)?,
        };
        if let Some(i) = p.left {
            left_seen[i] += 1;
        }
        if let Some(j) = p.right {
            right_seen[j] += 1;
        }
        cost += d;
    }
    if left_seen.iter().chain(&right_seen).any(|&k| k != 1) {
        return Err(Error::InvalidProduct(
            "alignment must use every concept exactly once".into(),
        ));
    }
    Ok(cost)
}

fn concept(p: &Product, i: usize) -> Result<&crate::concept::Concept> {
    p.concepts()
        .get(i)
        .ok_or_else(|| Error::InvalidProduct(format!("concept index {i} out of range")))
}

/// Cost of the cheapest alignment between `s` and `t`, where concepts may
/// also be aligned to the nullconcept.
///
/// Solved exactly as an assignment problem on the `(|s| + |t|)` square
/// matrix whose extra rows and columns stand for the nullconcept.
pub fn alignment_distance<M: DistanceMetric + ?Sized>(
    s: &Product,
    t: &Product,
    metric: &M,
) -> Result<(f64, Alignment)> {
    let (n, m) = (s.len(), t.len());
    let size = n + m;
    let mut cost = vec![vec![0.0; size]; size];

    let left_null: Vec<f64> = s
        .concepts()
        .iter()
        .map(|x| metric.to_null(x))
        .collect::<Result<_>>()?;
    let right_null: Vec<f64> = t
        .concepts()
        .iter()
        .map(|y| metric.to_null(y))
        .collect::<Result<_>>()?;

    for (i, x) in s.concepts().iter().enumerate() {
        for (j, y) in t.concepts().iter().enumerate() {
            cost[i][j] = metric.distance(x, y)?;
        }
        for entry in &mut cost[i][m..] {
            *entry = left_null[i];
        }
    }
    for row in &mut cost[n..] {
        row[..m].copy_from_slice(&right_null);
    }

    let assignment = hungarian(&cost)?;
    let mut pairs = Vec::with_capacity(n + m);
    for &(i, j) in &assignment.pairs {
        let pair = match (i < n, j < m) {
            (true, true) => AlignedPair {
                left: Some(i),
                right: Some(j),
            },
            (true, false) => AlignedPair {
                left: Some(i),
                right: None,
            },
            (false, true) => AlignedPair {
                left: None,
                right: Some(j),
            },
            (false, false) => continue,
        };
        pairs.push(pair);
    }
    pairs.sort();
    let dist = assignment.total;
    Ok((dist, Alignment { pairs, cost: dist }))
}
