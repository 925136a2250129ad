//! Gradient-boosted regression trees under squared loss.
//!
//! Each round fits a depth-limited tree to the current residuals with exact
//! greedy splits; leaves hold the mean residual and the tree is added with
//! the shrinkage factor.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_MAGIC: &str = "GBT1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub shrinkage: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            n_trees: 15,
            max_depth: 3,
            shrinkage: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Rows with `x[feature] < threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    /// Node 0 is the root.
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf(value)],
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] < threshold { left } else { right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub features: Vec<String>,
    pub base_score: f64,
    pub shrinkage: f64,
    pub max_trees: usize,
    pub max_depth: usize,
    pub trees: Vec<RegressionTree>,
}

fn check_row(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: x.len(),
        });
    }
    Ok(())
}

impl GbtModel {
    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    /// Prediction using only the first `k` trees.
    pub fn predict_first(&self, x: &[f64], k: usize) -> Result<f64> {
        check_row(x, self.n_features())?;
        let sum: f64 = self.trees.iter().take(k).map(|t| t.eval(x)).sum();
        Ok(self.base_score + self.shrinkage * sum)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MODEL_MAGIC}\n");
        writeln!(out, "features {} {}", self.features.len(), self.features.join(" ")).unwrap();
        writeln!(out, "base_score {}", self.base_score).unwrap();
        writeln!(out, "shrinkage {}", self.shrinkage).unwrap();
        writeln!(out, "max_trees {}", self.max_trees).unwrap();
        writeln!(out, "max_depth {}", self.max_depth).unwrap();
        writeln!(out, "trees {}", self.trees.len()).unwrap();
        for t in &self.trees {
            writeln!(out, "tree {}", t.nodes.len()).unwrap();
            for n in &t.nodes {
                match n {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => writeln!(out, "split {feature} {threshold} {left} {right}").unwrap(),
                    Node::Leaf(v) => writeln!(out, "leaf {v}").unwrap(),
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(no, l)| (no + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, toks)| !toks.is_empty());
        let mut next = || {
            lines
                .next()
                .ok_or_else(|| Error::ModelFormat("unexpected end of model".into()))
        };
        fn field<'a>(line: (usize, Vec<&'a str>), key: &str) -> Result<(usize, Vec<&'a str>)> {
            if line.1[0] != key {
                return Err(Error::ModelFormat(format!("line {}: expected `{key}`", line.0)));
            }
            Ok((line.0, line.1[1..].to_vec()))
        }
        fn num<T: std::str::FromStr>(line: usize, s: Option<&&str>) -> Result<T> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::ModelFormat(format!("line {line}: bad number")))
        }

        let (l, magic) = next()?;
        if magic != [MODEL_MAGIC] {
            return Err(Error::ModelFormat(format!("line {l}: expected `{MODEL_MAGIC}`")));
        }
        let (l, f) = field(next()?, "features")?;
        let d: usize = num(l, f.first())?;
        let features: Vec<String> = f[1..].iter().map(|s| s.to_string()).collect();
        if features.len() != d {
            return Err(Error::ModelFormat(format!(
                "line {l}: {d} features declared, {} named",
                features.len()
            )));
        }
        let (l, v) = field(next()?, "base_score")?;
        let base_score: f64 = num(l, v.first())?;
        let (l, v) = field(next()?, "shrinkage")?;
        let shrinkage: f64 = num(l, v.first())?;
        let (l, v) = field(next()?, "max_trees")?;
        let max_trees: usize = num(l, v.first())?;
        let (l, v) = field(next()?, "max_depth")?;
        let max_depth: usize = num(l, v.first())?;
        let (l, v) = field(next()?, "trees")?;
        let count: usize = num(l, v.first())?;
        let mut trees = Vec::with_capacity(count);
        for _ in 0..count {
            let (l, v) = field(next()?, "tree")?;
            let n: usize = num(l, v.first())?;
            let mut nodes = Vec::with_capacity(n);
            for _ in 0..n {
                let (l, toks) = next()?;
                let node = match toks[0] {
                    "split" => Node::Split {
                        feature: num(l, toks.get(1))?,
                        threshold: num(l, toks.get(2))?,
                        left: num(l, toks.get(3))?,
                        right: num(l, toks.get(4))?,
                    },
                    "leaf" => Node::Leaf(num(l, toks.get(1))?),
                    other => {
                        return Err(Error::ModelFormat(format!(
                            "line {l}: expected `split` or `leaf`, found `{other}`"
                        )))
                    }
                };
                nodes.push(node);
            }
            trees.push(RegressionTree { nodes });
        }
        if let Ok((l, _)) = next() {
            return Err(Error::ModelFormat(format!("line {l}: trailing content")));
        }
        let model = Self {
            features,
            base_score,
            shrinkage,
            max_trees,
            max_depth,
            trees,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.trees.len() > self.max_trees {
            return Err(Error::ModelFormat("more trees than max_trees".into()));
        }
        if !self.base_score.is_finite() || !self.shrinkage.is_finite() {
            return Err(Error::ModelFormat("non-finite parameter".into()));
        }
        for t in &self.trees {
            if t.nodes.is_empty() {
                return Err(Error::ModelFormat("tree without nodes".into()));
            }
            for (i, n) in t.nodes.iter().enumerate() {
                match *n {
                    Node::Leaf(v) if !v.is_finite() => {
                        return Err(Error::ModelFormat("non-finite leaf".into()))
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        let ok = feature < self.n_features()
                            && threshold.is_finite()
                            && left > i
                            && right > i
                            && left < t.nodes.len()
                            && right < t.nodes.len();
                        if !ok {
                            return Err(Error::ModelFormat(format!("invalid split node {i}")));
                        }
                    }
                    Node::Leaf(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

impl std::str::FromStr for GbtModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GbtModel::parse(s)
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

fn mean(idx: &[usize], r: &[f64]) -> f64 {
    idx.iter().map(|&i| r[i]).sum::<f64>() / idx.len() as f64
}

fn best_split(x: &[Vec<f64>], r: &[f64], idx: &[usize]) -> Option<Split> {
    let n = idx.len() as f64;
    let total: f64 = idx.iter().map(|&i| r[i]).sum();
    let parent = total * total / n;
    let mut best: Option<Split> = None;
    let d = x[idx[0]].len();
    let mut order = idx.to_vec();
    #[allow(clippy::needless_range_loop)]
    for f in 0..d {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = 0.0;
        for k in 0..order.len() - 1 {
            left += r[order[k]];
            let (lo, hi) = (x[order[k]][f], x[order[k + 1]][f]);
            if lo == hi {
                continue;
            }
            let nl = (k + 1) as f64;
            let right = total - left;
            let gain = left * left / nl + right * right / (n - nl) - parent;
            let threshold = lo + (hi - lo) / 2.0;
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Split {
                    feature: f,
                    threshold,
                    gain,
                });
            }
        }
    }
    // tiny gains are floating-point noise
    best.filter(|b| b.gain > 1e-12 * (1.0 + parent.abs()))
}

fn grow(
    x: &[Vec<f64>],
    r: &[f64],
    idx: Vec<usize>,
    depth: usize,
    max_depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let me = nodes.len();
    nodes.push(Node::Leaf(mean(&idx, r)));
    if depth >= max_depth || idx.len() < 2 {
        return me;
    }
    let Some(split) = best_split(x, r, &idx) else {
        return me;
    };
    let (li, ri): (Vec<usize>, Vec<usize>) =
        idx.into_iter().partition(|&i| x[i][split.feature] < split.threshold);
    let left = grow(x, r, li, depth + 1, max_depth, nodes);
    let right = grow(x, r, ri, depth + 1, max_depth, nodes);
    nodes[me] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    me
}

/// Fits `params.n_trees` boosting rounds to `(x, y)`; the base score is the
/// target mean.
pub fn fit_gbt(x: &[Vec<f64>], y: &[f64], features: &[String], params: &GbtParams) -> Result<GbtModel> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Training(format!("need at least 2 rows, got {}", x.len())));
    }
    let d = features.len();
    if d == 0 {
        return Err(Error::Training("no features".into()));
    }
    for row in x {
        check_row(row, d)?;
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Training("non-finite value in training data".into()));
    }
    if !(params.shrinkage > 0.0 && params.shrinkage <= 1.0) {
        return Err(Error::Training(format!("shrinkage {} outside (0, 1]", params.shrinkage)));
    }
    let base_score = y.iter().sum::<f64>() / y.len() as f64;
    let mut pred = vec![base_score; y.len()];
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let residual: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let mut nodes = Vec::new();
        grow(x, &residual, (0..y.len()).collect(), 0, params.max_depth, &mut nodes);
        let tree = RegressionTree { nodes };
        for (p, row) in pred.iter_mut().zip(x) {
            *p += params.shrinkage * tree.eval(row);
        }
        trees.push(tree);
    }
    Ok(GbtModel {
        features: features.to_vec(),
        base_score,
        shrinkage: params.shrinkage,
        max_trees: params.n_trees,
        max_depth: params.max_depth,
        trees,
    })
}

pub fn predict(model: &GbtModel, x: &[f64]) -> Result<f64> {
    model.predict_first(x, model.trees.len())
}
