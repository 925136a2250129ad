use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::ScoredCorpus;
use super::gbt::{fit_gbt, predict, GbtModel, GbtParams};
use super::labels::{weighted_combination, ExpertLabels};
use super::tau::{restricted_tau, TauVariant};
use crate::error::{Error, Result};
use crate::measures::CreativityVector;

pub const DEFAULT_SEED: u64 = 20_230_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PerExpert,
    Combined,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::PerExpert => "per-expert",
            Mode::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Code,
    Visual,
    Audio,
    Weighted,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::Code, Target::Visual, Target::Audio, Target::Weighted];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Code => "code",
            Target::Visual => "visual",
            Target::Audio => "audio",
            Target::Weighted => "weighted",
        }
    }

    /// Indices into [`CreativityVector::NAMES`] used as model inputs.
    pub fn feature_indices(self) -> Vec<usize> {
        match self {
            Target::Code => vec![0, 1, 2],
            Target::Visual => vec![3, 4, 5],
            Target::Audio => vec![6, 7, 8],
            Target::Weighted => (0..9).collect(),
        }
    }

    pub fn feature_names(self) -> Vec<String> {
        self.feature_indices()
            .into_iter()
            .map(|i| CreativityVector::NAMES[i].to_string())
            .collect()
    }

    fn value(self, labels: &ExpertLabels, row: usize) -> Result<f64> {
        let r = &labels.rows[row];
        Ok(match self {
            Target::Code => r.code,
            Target::Visual => r.visual,
            Target::Audio => r.audio,
            Target::Weighted => weighted_combination(labels, &r.expert_id, &r.project_id)?,
        })
    }
}

/// Knobs of the evaluation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub combined_folds: usize,
    pub expert_folds: usize,
    pub combined_trees: usize,
    pub expert_trees: usize,
    /// Tree count for experts who rated at most `small_expert_rows` projects.
    pub small_expert_trees: usize,
    pub small_expert_rows: usize,
    /// Depth for models on one aspect's three features.
    pub aspect_depth: usize,
    /// Depth for the model on all nine features.
    pub full_depth: usize,
    pub shrinkage: f64,
    pub tau: TauVariant,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            combined_folds: 10,
            expert_folds: 5,
            combined_trees: 29,
            expert_trees: 15,
            small_expert_trees: 10,
            small_expert_rows: 10,
            aspect_depth: 3,
            full_depth: 4,
            shrinkage: 0.3,
            tau: TauVariant::B,
        }
    }
}

impl Protocol {
    pub fn params(&self, mode: Mode, target: Target, rows: usize) -> GbtParams {
        let n_trees = match mode {
            Mode::Combined => self.combined_trees,
            Mode::PerExpert if rows <= self.small_expert_rows => self.small_expert_trees,
            Mode::PerExpert => self.expert_trees,
        };
        let max_depth = if target == Target::Weighted {
            self.full_depth
        } else {
            self.aspect_depth
        };
        GbtParams {
            n_trees,
            max_depth,
            shrinkage: self.shrinkage,
        }
    }

    fn folds(&self, mode: Mode) -> usize {
        match mode {
            Mode::Combined => self.combined_folds,
            Mode::PerExpert => self.expert_folds,
        }
    }
}

/// Shuffles `0..n` with `seed` and cuts it into `k` contiguous folds whose
/// sizes differ by at most one. Every fold holds at least two rows.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || n < 2 * k {
        return Err(Error::Training(format!(
            "{n} rows cannot fill {k} folds of at least two rows"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = n / k + usize::from(f < n % k);
        let mut fold = order[start..start + size].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += size;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    /// Test rows as `project@expert`.
    pub test: Vec<String>,
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    /// Expert id, or `combined`.
    pub group: String,
    pub rows: usize,
    pub n_trees: usize,
    pub max_depth: usize,
    pub folds: Vec<FoldReport>,
    /// Mean over folds with a defined tau.
    pub mean_tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub mode: Mode,
    pub target: Target,
    pub features: Vec<String>,
    pub groups: Vec<GroupReport>,
    /// Mean of the group means.
    pub mean_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub seed: u64,
    pub protocol: Protocol,
    pub entries: Vec<TargetReport>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Feature rows and targets of one experiment, in label-row order.
pub struct Dataset {
    pub row_ids: Vec<String>,
    pub experts: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(corpus: &ScoredCorpus, labels: &ExpertLabels, target: Target) -> Result<Self> {
        let vectors = corpus.row_vectors(labels)?;
        let idx = target.feature_indices();
        let x = vectors
            .iter()
            .map(|v| {
                let a = v.to_array();
                idx.iter().map(|&i| a[i]).collect()
            })
            .collect();
        let y = (0..labels.rows.len())
            .map(|r| target.value(labels, r))
            .collect::<Result<_>>()?;
        Ok(Self {
            row_ids: labels
                .rows
                .iter()
                .map(|r| format!("{}@{}", r.project_id, r.expert_id))
                .collect(),
            experts: labels.rows.iter().map(|r| r.expert_id.clone()).collect(),
            x,
            y,
        })
    }

    fn subset(&self, rows: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            rows.iter().map(|&r| self.x[r].clone()).collect(),
            rows.iter().map(|&r| self.y[r]).collect(),
        )
    }
}

fn run_fold(
    data: &Dataset,
    rows: &[usize],
    test: &[usize],
    features: &[String],
    params: &GbtParams,
    tau: TauVariant,
) -> Result<f64> {
    let train: Vec<usize> = rows.iter().copied().filter(|r| !test.contains(r)).collect();
    let (x, y) = data.subset(&train);
    let model = fit_gbt(&x, &y, features, params)?;
    let truth: HashMap<String, f64> = rows.iter().map(|&r| (data.row_ids[r].clone(), data.y[r])).collect();
    let predicted = test
        .iter()
        .map(|&r| Ok((data.row_ids[r].clone(), predict(&model, &data.x[r])?)))
        .collect::<Result<HashMap<_, _>>>()?;
    let ids = |v: &[usize]| v.iter().map(|&r| data.row_ids[r].clone()).collect::<Vec<_>>();
    restricted_tau(&truth, &predicted, &ids(&train), &ids(test), tau)
}

fn run_group(
    data: &Dataset,
    group: &str,
    rows: &[usize],
    mode: Mode,
    target: Target,
    protocol: &Protocol,
    seed: u64,
) -> Result<GroupReport> {
    let params = protocol.params(mode, target, rows.len());
    let features = target.feature_names();
    let folds = make_folds(rows.len(), protocol.folds(mode), seed)?;
    let reports: Vec<FoldReport> = folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let test: Vec<usize> = fold.iter().map(|&i| rows[i]).collect();
            let result = run_fold(data, rows, &test, &features, &params, protocol.tau);
            FoldReport {
                fold: f,
                test: test.iter().map(|&r| data.row_ids[r].clone()).collect(),
                tau: result.as_ref().ok().copied(),
                error: result.err().map(|e| e.to_string()),
            }
        })
        .collect();
    Ok(GroupReport {
        group: group.to_string(),
        rows: rows.len(),
        n_trees: params.n_trees,
        max_depth: params.max_depth,
        mean_tau: mean(reports.iter().filter_map(|f| f.tau)),
        folds: reports,
    })
}

/// Cross-validated restricted tau for one mode and target. Fold seeds are
/// derived from `seed` and the group position, so reruns are identical.
pub fn run_experiment(
    corpus: &ScoredCorpus,
    labels: &ExpertLabels,
    mode: Mode,
    target: Target,
    protocol: &Protocol,
    seed: u64,
) -> Result<TargetReport> {
    let data = Dataset::new(corpus, labels, target)?;
    let groups: Vec<(String, Vec<usize>)> = match mode {
        Mode::Combined => vec![("combined".to_string(), (0..data.y.len()).collect())],
        Mode::PerExpert => labels
            .experts()
            .into_iter()
            .map(|e| {
                let rows = (0..data.y.len()).filter(|&r| data.experts[r] == e).collect();
                (e, rows)
            })
            .collect(),
    };
    let groups = groups
        .iter()
        .enumerate()
        .map(|(g, (name, rows))| {
            run_group(&data, name, rows, mode, target, protocol, seed.wrapping_add(g as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_tau = mean(groups.iter().filter_map(|g| g.mean_tau));
    let error = mean_tau
        .is_none()
        .then(|| {
            groups
                .iter()
                .flat_map(|g| g.folds.iter().filter_map(|f| f.error.clone()))
                .next()
        })
        .flatten();
    Ok(TargetReport {
        mode,
        target,
        features: target.feature_names(),
        groups,
        mean_tau,
        error,
    })
}

pub fn evaluate(
    corpus: &ScoredCorpus,
    labels: &ExpertLabels,
    modes: &[Mode],
    targets: &[Target],
    protocol: &Protocol,
    seed: u64,
) -> Result<EvalReport> {
    let mut entries = Vec::new();
    for &mode in modes {
        for &target in targets {
            entries.push(run_experiment(corpus, labels, mode, target, protocol, seed)?);
        }
    }
    Ok(EvalReport {
        seed,
        protocol: *protocol,
        entries,
    })
}

/// Fits one model on all rows of `expert` (or all rows when `None`).
pub fn train_model(
    corpus: &ScoredCorpus,
    labels: &ExpertLabels,
    expert: Option<&str>,
    target: Target,
    protocol: &Protocol,
) -> Result<GbtModel> {
    let data = Dataset::new(corpus, labels, target)?;
    let rows: Vec<usize> = (0..data.y.len())
        .filter(|&r| expert.is_none_or(|e| data.experts[r] == e))
        .collect();
    if rows.is_empty() {
        return Err(Error::Labels(format!("no rows for expert `{}`", expert.unwrap_or(""))));
    }
    let mode = if expert.is_some() { Mode::PerExpert } else { Mode::Combined };
    let params = protocol.params(mode, target, rows.len());
    let (x, y) = data.subset(&rows);
    fit_gbt(&x, &y, &target.feature_names(), &params)
}

fn cell(t: Option<f64>) -> String {
    t.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
}

impl EvalReport {
    /// Mean of the entry means over every mode and target.
    pub fn mean_tau(&self) -> Option<f64> {
        mean(self.entries.iter().filter_map(|e| e.mean_tau))
    }

    /// Mean of the entry means of one mode.
    pub fn mode_mean_tau(&self, mode: Mode) -> Option<f64> {
        mean(self.entries.iter().filter(|e| e.mode == mode).filter_map(|e| e.mean_tau))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Mean restricted tau with one row per target and one column per
    /// expert plus the combined model.
    pub fn to_table(&self) -> String {
        let mut columns: Vec<String> = Vec::new();
        for e in &self.entries {
            for g in &e.groups {
                if !columns.contains(&g.group) {
                    columns.push(g.group.clone());
                }
            }
        }
        let mut targets: Vec<Target> = Vec::new();
        for e in &self.entries {
            if !targets.contains(&e.target) {
                targets.push(e.target);
            }
        }
        let mut out = format!("Kendall's tau (restricted, mean over folds), seed {}\n", self.seed);
        write!(out, "{:<10}", "model").unwrap();
        for c in &columns {
            write!(out, " {c:>10}").unwrap();
        }
        out.push('\n');
        for t in targets {
            write!(out, "{:<10}", t.as_str()).unwrap();
            for c in &columns {
                let v = self
                    .entries
                    .iter()
                    .filter(|e| e.target == t)
                    .flat_map(|e| &e.groups)
                    .find(|g| &g.group == c)
                    .and_then(|g| g.mean_tau);
                write!(out, " {:>10}", cell(v)).unwrap();
            }
            out.push('\n');
        }
        writeln!(out, "overall mean {}", cell(self.mean_tau())).unwrap();
        out
    }
}
