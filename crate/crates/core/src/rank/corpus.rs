use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::labels::{ExpertLabels, ExpertWeights, LabelRow};
use crate::concept::{CosineMetric, DistanceMetric, MatrixMetric};
use crate::error::{Error, Result};
use crate::measures::{CreativityVector, MeasureConfig};
use crate::media::{
    audio_scores, visual_scores, FeatureStore, MediaFeatures, Provenance,
};
use crate::scratch::{code_creativity, code_project_distance, Sb3Project};

/// Sum and number of cross-pair distances between two projects' assets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PairSum {
    pub sum: f64,
    pub count: usize,
}

/// Everything needed to assemble creativity vectors for any choice of
/// reference sample: per-project fluency and flexibility plus all pairwise
/// distance terms used by originality.
#[derive(Debug, Clone)]
pub struct ScoredCorpus {
    pub ids: Vec<String>,
    /// code, visual and audio (fluency, flexibility) per project.
    base: Vec<[f64; 6]>,
    code: Vec<Vec<f64>>,
    visual: Vec<Vec<PairSum>>,
    audio: Vec<Vec<PairSum>>,
    pub provenance: Vec<(Provenance, Provenance)>,
}

fn pair_sum<M: DistanceMetric>(xs: &[crate::concept::Concept], ys: &[crate::concept::Concept], metric: &M) -> Result<PairSum> {
    let mut sum = 0.0;
    for x in xs {
        for y in ys {
            sum += metric.distance(x, y)?;
        }
    }
    Ok(PairSum {
        sum,
        count: xs.len() * ys.len(),
    })
}

fn symmetric<T: Copy + Default + Send>(
    n: usize,
    f: impl Fn(usize, usize) -> Result<T> + Sync,
) -> Result<Vec<Vec<T>>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<T> = pairs.par_iter().map(|&(i, j)| f(i, j)).collect::<Result<_>>()?;
    let mut m = vec![vec![T::default(); n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(m)
}

impl ScoredCorpus {
    pub fn build(projects: &[Sb3Project], store: &FeatureStore, code_cfg: &MeasureConfig) -> Result<Self> {
        let media: Vec<MediaFeatures> = projects
            .par_iter()
            .map(|p| store.project_features(p))
            .collect::<Result<_>>()?;
        let base: Vec<[f64; 6]> = projects
            .par_iter()
            .zip(&media)
            .map(|(p, m)| {
                let c = code_creativity(p, &[], code_cfg)?;
                let v = visual_scores(m, &[], &MeasureConfig::visual())?;
                let a = audio_scores(m, &[], &MeasureConfig::audio())?;
                Ok([c.fluency, c.flexibility, v.fluency, v.flexibility, a.fluency, a.flexibility])
            })
            .collect::<Result<_>>()?;
        let n = projects.len();
        let code = symmetric(n, |i, j| code_project_distance(&projects[i], &projects[j], code_cfg))?;
        let images: Vec<Vec<_>> = media
            .iter()
            .map(|m| {
                m.images
                    .iter()
                    .map(|(d, v)| crate::concept::Concept::vector(d.clone(), v.clone()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let sounds: Vec<Vec<_>> = media
            .iter()
            .map(|m| {
                m.sounds
                    .iter()
                    .map(|(d, x)| crate::concept::Concept::matrix(d.clone(), x.clone()))
                    .collect()
            })
            .collect();
        let visual = symmetric(n, |i, j| pair_sum(&images[i], &images[j], &CosineMetric))?;
        let audio = symmetric(n, |i, j| pair_sum(&sounds[i], &sounds[j], &MatrixMetric))?;
        Ok(Self {
            ids: projects.iter().map(|p| p.name.clone()).collect(),
            base,
            code,
            visual,
            audio,
            provenance: media.iter().map(|m| (m.image_source, m.sound_source)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|p| p == id)
    }

    pub fn code_distance(&self, i: usize, j: usize) -> f64 {
        self.code[i][j]
    }

    /// Creativity vector of project `i` with originality measured against
    /// the `reference` projects (`i` itself is skipped). Originality is 0
    /// for an empty reference.
    pub fn vector(&self, i: usize, reference: &[usize]) -> CreativityVector {
        let refs: Vec<usize> = reference.iter().copied().filter(|&j| j != i).collect();
        let code = if refs.is_empty() {
            0.0
        } else {
            refs.iter().map(|&j| self.code[i][j]).sum::<f64>() / refs.len() as f64
        };
        let pooled = |m: &Vec<Vec<PairSum>>| {
            let (s, c) = refs
                .iter()
                .fold((0.0, 0usize), |(s, c), &j| (s + m[i][j].sum, c + m[i][j].count));
            if c == 0 {
                0.0
            } else {
                s / c as f64
            }
        };
        let b = &self.base[i];
        CreativityVector {
            code_fluency: b[0],
            code_flexibility: b[1],
            code_originality: code,
            visual_fluency: b[2],
            visual_flexibility: b[3],
            visual_originality: pooled(&self.visual),
            audio_fluency: b[4],
            audio_flexibility: b[5],
            audio_originality: pooled(&self.audio),
        }
    }

    /// Indices of label project ids, failing with every unknown id.
    pub fn resolve(&self, labels: &ExpertLabels) -> Result<HashMap<String, usize>> {
        let mut map = HashMap::new();
        let mut unknown = Vec::new();
        for r in &labels.rows {
            match self.index(&r.project_id) {
                Some(i) => {
                    map.insert(r.project_id.clone(), i);
                }
                None if !unknown.contains(&r.project_id) => unknown.push(r.project_id.clone()),
                None => {}
            }
        }
        if !unknown.is_empty() {
            unknown.sort();
            return Err(Error::UnknownProjects(unknown));
        }
        Ok(map)
    }

    /// Creativity vector per label row, with originality measured against
    /// the other projects rated by the same expert.
    pub fn row_vectors(&self, labels: &ExpertLabels) -> Result<Vec<CreativityVector>> {
        let index = self.resolve(labels)?;
        let mut by_expert: HashMap<&str, Vec<usize>> = HashMap::new();
        for r in &labels.rows {
            by_expert.entry(&r.expert_id).or_default().push(index[&r.project_id]);
        }
        Ok(labels
            .rows
            .iter()
            .map(|r| self.vector(index[&r.project_id], &by_expert[r.expert_id.as_str()]))
            .collect())
    }
}

/// Positive coefficients (summing to one) of the linear label functions.
pub const SYNTHETIC_COEFFICIENTS: [[f64; 3]; 3] = [[0.5, 0.3, 0.2], [0.4, 0.4, 0.2], [0.3, 0.3, 0.4]];

/// Labels that are a noiseless linear function of the nine features: each
/// aspect score is `100 * sum(c_k * z_k)` over that aspect's three
/// features, min-max scaled over all rows. One weight vector drawn from
/// `seed` is shared by every expert, so the weighted target is linear in
/// the nine features too.
pub fn synthetic_labels(
    corpus: &ScoredCorpus,
    assignment: &[(String, usize)],
    seed: u64,
) -> Result<ExpertLabels> {
    let mut rows: Vec<LabelRow> = assignment
        .iter()
        .map(|(e, p)| LabelRow {
            project_id: corpus.ids[*p].clone(),
            expert_id: e.clone(),
            code: 0.0,
            visual: 0.0,
            audio: 0.0,
            idea: None,
            final_score: None,
        })
        .collect();
    let skeleton = ExpertLabels::new(rows.clone(), Default::default())?;
    let vectors: Vec<[f64; 9]> = corpus.row_vectors(&skeleton)?.iter().map(|v| v.to_array()).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 9], [f64::NEG_INFINITY; 9]);
    for v in &vectors {
        for k in 0..9 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let z = |v: &[f64; 9], k: usize| {
        if hi[k] > lo[k] {
            (v[k] - lo[k]) / (hi[k] - lo[k])
        } else {
            0.0
        }
    };
    for (row, v) in rows.iter_mut().zip(&vectors) {
        let aspect = |a: usize| {
            let s: f64 = (0..3).map(|k| SYNTHETIC_COEFFICIENTS[a][k] * z(v, 3 * a + k)).sum();
            (100.0 * s).clamp(0.0, 100.0)
        };
        row.code = aspect(0);
        row.visual = aspect(1);
        row.audio = aspect(2);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = ExpertWeights {
        w_code: rng.gen_range(0.1..0.4),
        w_visual: rng.gen_range(0.1..0.4),
        w_audio: rng.gen_range(0.05..0.2),
        w_idea: rng.gen_range(0.1..0.3),
        w_other: rng.gen_range(0.0..0.1),
    };
    let weights = skeleton.experts().into_iter().map(|e| (e, w)).collect();
    let mut labels = ExpertLabels::new(rows, weights)?;
    for i in 0..labels.rows.len() {
        let (e, p) = (labels.rows[i].expert_id.clone(), labels.rows[i].project_id.clone());
        let w = super::labels::weighted_combination(&labels, &e, &p)?;
        labels.rows[i].final_score = Some(w.clamp(0.0, 100.0));
    }
    Ok(labels)
}
