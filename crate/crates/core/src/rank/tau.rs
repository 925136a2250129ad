use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauVariant {
    /// No tie correction.
    A,
    /// Tie-adjusted.
    #[default]
    B,
}

impl std::str::FromStr for TauVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "tau-a" => Ok(TauVariant::A),
            "b" | "tau-b" => Ok(TauVariant::B),
            _ => Err(format!("unknown tau variant `{s}` (expected a or b)")),
        }
    }
}

fn sign(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[derive(Default)]
struct PairCounts {
    pairs: i64,
    tied_a: i64,
    tied_b: i64,
    score: i64,
}

impl PairCounts {
    fn add(&mut self, sa: i64, sb: i64) {
        self.pairs += 1;
        self.tied_a += (sa == 0) as i64;
        self.tied_b += (sb == 0) as i64;
        self.score += sa * sb;
    }

    fn tau(&self, variant: TauVariant) -> Result<f64> {
        if self.pairs == 0 {
            return Err(Error::UndefinedTau("no pairs to compare".into()));
        }
        match variant {
            TauVariant::A => Ok(self.score as f64 / self.pairs as f64),
            TauVariant::B => {
                let (na, nb) = (self.pairs - self.tied_a, self.pairs - self.tied_b);
                if na == 0 || nb == 0 {
                    return Err(Error::UndefinedTau(
                        "one ranking is completely tied".into(),
                    ));
                }
                let tau = self.score as f64 / ((na as f64) * (nb as f64)).sqrt();
                Ok(tau.clamp(-1.0, 1.0))
            }
        }
    }
}

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::UndefinedTau(format!("need at least 2 items, got {}", a.len())));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ranking scores".into()));
    }
    Ok(())
}

/// Kendall rank correlation over all pairs.
pub fn kendall_tau(a: &[f64], b: &[f64], variant: TauVariant) -> Result<f64> {
    check(a, b)?;
    let mut c = PairCounts::default();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            c.add(sign(a[i] - a[j]), sign(b[i] - b[j]));
        }
    }
    c.tau(variant)
}

/// Kendall's tau over the pairs that touch at least one `test` position.
pub fn kendall_tau_touching(a: &[f64], b: &[f64], test: &[bool], variant: TauVariant) -> Result<f64> {
    check(a, b)?;
    if test.len() != a.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: test.len(),
        });
    }
    if !test.iter().any(|&t| t) {
        return Err(Error::UndefinedTau("empty test set".into()));
    }
    let mut c = PairCounts::default();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if test[i] || test[j] {
                c.add(sign(a[i] - a[j]), sign(b[i] - b[j]));
            }
        }
    }
    c.tau(variant)
}

/// Compares the ranking "training items at their true score, test items at
/// their predicted score" against the all-true ranking, counting only
/// pairs with at least one test item.
pub fn restricted_tau(
    truth: &HashMap<String, f64>,
    predicted_test: &HashMap<String, f64>,
    train_ids: &[String],
    test_ids: &[String],
    variant: TauVariant,
) -> Result<f64> {
    if test_ids.is_empty() {
        return Err(Error::UndefinedTau("empty test set".into()));
    }
    let lookup = |m: &HashMap<String, f64>, id: &String| {
        m.get(id)
            .copied()
            .ok_or_else(|| Error::UnknownProjects(vec![id.clone()]))
    };
    let mut combined = Vec::new();
    let mut true_scores = Vec::new();
    let mut is_test = Vec::new();
    for id in train_ids {
        combined.push(lookup(truth, id)?);
        true_scores.push(lookup(truth, id)?);
        is_test.push(false);
    }
    for id in test_ids {
        combined.push(lookup(predicted_test, id)?);
        true_scores.push(lookup(truth, id)?);
        is_test.push(true);
    }
    kendall_tau_touching(&combined, &true_scores, &is_test, variant)
}
