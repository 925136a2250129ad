use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One expert's scores for one project, each in `[0, 100]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub project_id: String,
    pub expert_id: String,
    pub code: f64,
    pub visual: f64,
    pub audio: f64,
    pub idea: Option<f64>,
    #[serde(rename = "final")]
    pub final_score: Option<f64>,
}

/// Aspect weights of one expert, normalized to sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpertWeights {
    pub w_code: f64,
    pub w_visual: f64,
    pub w_audio: f64,
    pub w_idea: f64,
    pub w_other: f64,
}

impl ExpertWeights {
    pub fn normalized(self) -> Result<Self> {
        let all = [self.w_code, self.w_visual, self.w_audio, self.w_idea, self.w_other];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Labels("weights must be finite and non-negative".into()));
        }
        let sum: f64 = all.iter().sum();
        if sum <= 0.0 {
            return Err(Error::Labels("weights sum to zero".into()));
        }
        Ok(Self {
            w_code: self.w_code / sum,
            w_visual: self.w_visual / sum,
            w_audio: self.w_audio / sum,
            w_idea: self.w_idea / sum,
            w_other: self.w_other / sum,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpertLabels {
    pub rows: Vec<LabelRow>,
    pub weights: BTreeMap<String, ExpertWeights>,
}

#[derive(Deserialize, Serialize)]
struct WeightRow {
    expert_id: String,
    w_code: f64,
    w_visual: f64,
    w_audio: f64,
    w_idea: f64,
    w_other: f64,
}

fn check_score(row: &LabelRow) -> Result<()> {
    let scores = [Some(row.code), Some(row.visual), Some(row.audio), row.idea, row.final_score];
    for s in scores.into_iter().flatten() {
        if !(0.0..=100.0).contains(&s) {
            return Err(Error::Labels(format!(
                "score {s} of project `{}` by `{}` is outside [0, 100]",
                row.project_id, row.expert_id
            )));
        }
    }
    Ok(())
}

impl ExpertLabels {
    pub fn new(rows: Vec<LabelRow>, weights: BTreeMap<String, ExpertWeights>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for r in &rows {
            check_score(r)?;
            if !seen.insert((r.project_id.clone(), r.expert_id.clone())) {
                return Err(Error::Labels(format!(
                    "project `{}` scored twice by `{}`",
                    r.project_id, r.expert_id
                )));
            }
        }
        let weights = weights
            .into_iter()
            .map(|(k, w)| Ok((k, w.normalized()?)))
            .collect::<Result<_>>()?;
        Ok(Self { rows, weights })
    }

    pub fn read_csv<L: Read, W: Read>(labels: L, weights: Option<W>) -> Result<Self> {
        let rows = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(labels)
            .deserialize()
            .collect::<std::result::Result<Vec<LabelRow>, _>>()?;
        let mut map = BTreeMap::new();
        if let Some(w) = weights {
            for row in csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(w).deserialize() {
                let r: WeightRow = row?;
                let w = ExpertWeights {
                    w_code: r.w_code,
                    w_visual: r.w_visual,
                    w_audio: r.w_audio,
                    w_idea: r.w_idea,
                    w_other: r.w_other,
                };
                map.insert(r.expert_id, w);
            }
        }
        Self::new(rows, map)
    }

    pub fn load(labels: impl AsRef<Path>, weights: Option<&Path>) -> Result<Self> {
        let l = std::fs::File::open(labels)?;
        match weights {
            Some(w) => Self::read_csv(l, Some(std::fs::File::open(w)?)),
            None => Self::read_csv(l, None::<&[u8]>),
        }
    }

    pub fn write_labels<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_weights<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (expert_id, weights) in &self.weights {
            w.serialize(WeightRow {
                expert_id: expert_id.clone(),
                w_code: weights.w_code,
                w_visual: weights.w_visual,
                w_audio: weights.w_audio,
                w_idea: weights.w_idea,
                w_other: weights.w_other,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Experts in first-appearance order.
    pub fn experts(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.expert_id) {
                out.push(r.expert_id.clone());
            }
        }
        out
    }

    pub fn row(&self, expert_id: &str, project_id: &str) -> Result<&LabelRow> {
        self.rows
            .iter()
            .find(|r| r.expert_id == expert_id && r.project_id == project_id)
            .ok_or_else(|| {
                Error::Labels(format!("expert `{expert_id}` did not score `{project_id}`"))
            })
    }
}

/// The expert's code, visual and audio scores averaged with their weights
/// renormalized over these three aspects.
pub fn weighted_combination(labels: &ExpertLabels, expert_id: &str, project_id: &str) -> Result<f64> {
    let row = labels.row(expert_id, project_id)?;
    let w = labels
        .weights
        .get(expert_id)
        .ok_or_else(|| Error::Labels(format!("no weights for expert `{expert_id}`")))?;
    let sum = w.w_code + w.w_visual + w.w_audio;
    if sum <= 0.0 {
        return Err(Error::Labels(format!(
            "expert `{expert_id}` puts no weight on code, visual or audio"
        )));
    }
    Ok((w.w_code * row.code + w.w_visual * row.visual + w.w_audio * row.audio) / sum)
}
