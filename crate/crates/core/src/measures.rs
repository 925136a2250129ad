//! Fluency, flexibility and originality of a product under a concept
//! distance.
//!
//! * fluency: sum of the distances of all concepts to the nullconcept;
//! * flexibility: sum of all pairwise concept distances, normalized by
//!   `|V| - 1`;
//! * originality: mean product distance to a reference sample.

use serde::{Deserialize, Serialize};

use crate::align::alignment_distance;
use crate::concept::{Concept, DistanceMetric, Product, Squared};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductDistance {
    /// Cheapest null-padded alignment.
    Alignment,
    /// Mean concept distance over all cross pairs.
    MeanPairwise,
    /// Stage tree edit distance plus Hungarian-matched sprite distances.
    /// Only defined for Scratch projects, see [`crate::scratch`].
    Tree3Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub squared: bool,
    pub dedup: bool,
    pub product_distance: ProductDistance,
}

impl MeasureConfig {
    pub const fn new(squared: bool, dedup: bool, product_distance: ProductDistance) -> Self {
        Self {
            squared,
            dedup,
            product_distance,
        }
    }

    pub const fn code() -> Self {
        Self::new(true, true, ProductDistance::Tree3Step)
    }

    pub const fn visual() -> Self {
        Self::new(false, true, ProductDistance::MeanPairwise)
    }

    pub const fn audio() -> Self {
        Self::new(false, true, ProductDistance::MeanPairwise)
    }
}

/// The nine automatic features of a Scratch project.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CreativityVector {
    pub code_fluency: f64,
    pub code_flexibility: f64,
    pub code_originality: f64,
    pub visual_fluency: f64,
    pub visual_flexibility: f64,
    pub visual_originality: f64,
    pub audio_fluency: f64,
    pub audio_flexibility: f64,
    pub audio_originality: f64,
}

impl CreativityVector {
    pub const NAMES: [&'static str; 9] = [
        "code_fluency",
        "code_flexibility",
        "code_originality",
        "visual_fluency",
        "visual_flexibility",
        "visual_originality",
        "audio_fluency",
        "audio_flexibility",
        "audio_originality",
    ];

    pub fn to_array(&self) -> [f64; 9] {
        [
            self.code_fluency,
            self.code_flexibility,
            self.code_originality,
            self.visual_fluency,
            self.visual_flexibility,
            self.visual_originality,
            self.audio_fluency,
            self.audio_flexibility,
            self.audio_originality,
        ]
    }

    pub fn from_array(v: [f64; 9]) -> Self {
        Self {
            code_fluency: v[0],
            code_flexibility: v[1],
            code_originality: v[2],
            visual_fluency: v[3],
            visual_flexibility: v[4],
            visual_originality: v[5],
            audio_fluency: v[6],
            audio_flexibility: v[7],
            audio_originality: v[8],
        }
    }

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite() && *v >= 0.0)
    }
}

fn lift<'m, M: DistanceMetric + ?Sized>(
    metric: &'m M,
    squared: bool,
) -> Box<dyn DistanceMetric + 'm> {
    if squared {
        Box::new(Squared(metric))
    } else {
        Box::new(metric)
    }
}

/// Sum of concept distances to the nullconcept, duplicates counted.
pub fn fluency<M: DistanceMetric + ?Sized>(
    s: &Product,
    metric: &M,
    cfg: &MeasureConfig,
) -> Result<f64> {
    let metric = lift(metric, cfg.squared);
    s.concepts().iter().map(|x| metric.to_null(x)).sum()
}

/// Sum over all ordered concept pairs `(x, y)` of `d(x, y)`, together with
/// the number of concepts it ran over. Dividing the sum by `count - 1`
/// gives [`flexibility`].
pub fn flexibility_sum<M: DistanceMetric + ?Sized>(
    s: &Product,
    metric: &M,
    cfg: &MeasureConfig,
) -> Result<(f64, usize)> {
    let metric = lift(metric, cfg.squared);
    let concepts: Vec<&Concept> = if cfg.dedup {
        s.distinct_concepts()
    } else {
        s.concepts().iter().collect()
    };
    let mut sum = 0.0;
    for (i, x) in concepts.iter().enumerate() {
        for y in &concepts[i + 1..] {
            sum += 2.0 * metric.distance(x, y)?;
        }
    }
    Ok((sum, concepts.len()))
}

/// Pairwise distance sum normalized by `|V| - 1`; zero for products with at
/// most one (distinct) concept.
pub fn flexibility<M: DistanceMetric + ?Sized>(
    s: &Product,
    metric: &M,
    cfg: &MeasureConfig,
) -> Result<f64> {
    let (sum, count) = flexibility_sum(s, metric, cfg)?;
    Ok(if count <= 1 {
        0.0
    } else {
        sum / (count - 1) as f64
    })
}

/// Mean concept distance over all cross pairs. Zero if either product is
/// empty.
pub fn mean_pairwise_distance<M: DistanceMetric + ?Sized>(
    s: &Product,
    t: &Product,
    metric: &M,
) -> Result<f64> {
    if s.is_empty() || t.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for x in s.concepts() {
        for y in t.concepts() {
            sum += metric.distance(x, y)?;
        }
    }
    Ok(sum / (s.len() * t.len()) as f64)
}

/// Product distance selected by `cfg`.
pub fn product_distance<M: DistanceMetric + ?Sized>(
    s: &Product,
    t: &Product,
    metric: &M,
    cfg: &MeasureConfig,
) -> Result<f64> {
    let metric = lift(metric, cfg.squared);
    match cfg.product_distance {
        ProductDistance::Alignment => Ok(alignment_distance(s, t, &*metric)?.0),
        ProductDistance::MeanPairwise => mean_pairwise_distance(s, t, &*metric),
        ProductDistance::Tree3Step => Err(Error::UnsupportedDistance(
            "tree_3step needs Scratch projects; use scratch::code_project_distance",
        )),
    }
}

/// Mean of `distance(s, s')` over the reference sample.
pub fn originality_with<P, F>(s: &P, sample: &[P], mut distance: F) -> Result<f64>
where
    F: FnMut(&P, &P) -> Result<f64>,
{
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sum = 0.0;
    for other in sample {
        sum += distance(s, other)?;
    }
    Ok(sum / sample.len() as f64)
}

/// Mean product distance of `s` to the reference sample.
pub fn originality<M: DistanceMetric + ?Sized>(
    s: &Product,
    sample: &[Product],
    metric: &M,
    cfg: &MeasureConfig,
) -> Result<f64> {
    originality_with(s, sample, |a, b| product_distance(a, b, metric, cfg))
}
