//! Visual and audio creativity: per-asset features from sidecars or the
//! built-in baselines, then fluency, flexibility and originality over
//! cosine (images) and padded matrix (sounds) distances.

mod baseline;
mod sidecar;

pub use baseline::{
    baseline_audio_features, baseline_image_embedding, decode_image, decode_wav,
    AudioFrameConfig, AUDIO_FEATURES, ENERGY_FLOOR_DB, IMAGE_EMBEDDING_DIM, ROLLOFF_FRACTION,
};
pub use sidecar::{load_sidecar, sidecar_path, FeatureKind, FeatureSidecar, SIDECAR_EXTENSION};

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::concept::{Concept, CosineMetric, DistanceMetric, FeatureMatrix, MatrixMetric, Product};
use crate::error::{Error, Result};
use crate::measures::{self, MeasureConfig};
use crate::scratch::{AssetKind, AssetRef, Sb3Project};

/// Where a project's features for one modality came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// The project has no assets of this kind.
    None,
    Sidecar,
    Baseline,
    Mixed,
}

impl Provenance {
    fn add(self, other: Provenance) -> Provenance {
        match (self, other) {
            (Provenance::None, x) | (x, Provenance::None) => x,
            (a, b) if a == b => a,
            _ => Provenance::Mixed,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::None => "none",
            Provenance::Sidecar => "sidecar",
            Provenance::Baseline => "baseline",
            Provenance::Mixed => "mixed",
        }
    }
}

/// Read-only source of asset features.
#[derive(Debug, Clone, Default)]
pub struct FeatureStore {
    /// Directory of `<digest>.cfv` sidecars.
    pub dir: Option<PathBuf>,
    /// Compute baseline features for assets without a sidecar.
    pub fallback: bool,
    pub frames: AudioFrameConfig,
}

impl FeatureStore {
    pub fn baseline() -> Self {
        Self {
            dir: None,
            fallback: true,
            frames: AudioFrameConfig::default(),
        }
    }

    pub fn sidecars(dir: impl Into<PathBuf>, fallback: bool) -> Self {
        Self {
            dir: Some(dir.into()),
            fallback,
            frames: AudioFrameConfig::default(),
        }
    }

    fn lookup(&self, kind: FeatureKind, digest: &str) -> Result<Option<FeatureSidecar>> {
        let Some(dir) = &self.dir else {
            return Ok(None);
        };
        match load_sidecar(dir, digest) {
            Ok(s) if s.kind != kind => Err(Error::Sidecar {
                digest: digest.to_string(),
                message: format!("expected {} features, found {}", kind.as_str(), s.kind.as_str()),
            }),
            Ok(s) => Ok(Some(s)),
            Err(Error::MissingFeatures(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Features of every image and sound of `p`. Assets without features
    /// are collected into one [`Error::MissingFeatures`] when fallback is
    /// off.
    pub fn project_features(&self, p: &Sb3Project) -> Result<MediaFeatures> {
        let mut missing = Vec::new();
        let mut out = MediaFeatures::default();
        for asset in &p.images {
            match self.lookup(FeatureKind::Image, &asset.digest)? {
                Some(s) => {
                    out.images.push((asset.digest.clone(), s.matrix.row(0).to_vec()));
                    out.image_source = out.image_source.add(Provenance::Sidecar);
                }
                None if self.fallback => {
                    if asset.filename.to_ascii_lowercase().ends_with(".svg") {
                        return Err(Error::Decode {
                            digest: asset.digest.clone(),
                            message: "vector costume; baseline features need a raster image, supply a sidecar".into(),
                        });
                    }
                    let img = decode_image(&asset.digest, &p.read_asset(asset)?)?;
                    let emb = baseline_image_embedding(&img).map_err(|_| Error::Decode {
                        digest: asset.digest.clone(),
                        message: "empty image".into(),
                    })?;
                    out.images.push((asset.digest.clone(), emb));
                    out.image_source = out.image_source.add(Provenance::Baseline);
                }
                None => missing.push(asset.digest.clone()),
            }
        }
        for asset in &p.sounds {
            match self.lookup(FeatureKind::Audio, &asset.digest)? {
                Some(s) => {
                    out.sounds.push((asset.digest.clone(), s.matrix));
                    out.sound_source = out.sound_source.add(Provenance::Sidecar);
                }
                None if self.fallback => {
                    out.sounds.push((asset.digest.clone(), self.baseline_sound(p, asset)?));
                    out.sound_source = out.sound_source.add(Provenance::Baseline);
                }
                None => missing.push(asset.digest.clone()),
            }
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::MissingFeatures(missing));
        }
        Ok(out)
    }

    fn baseline_sound(&self, p: &Sb3Project, asset: &AssetRef) -> Result<FeatureMatrix> {
        if !asset.extension().eq_ignore_ascii_case("wav") {
            return Err(Error::Decode {
                digest: asset.digest.clone(),
                message: format!(
                    "baseline audio features need PCM wav, got `{}`",
                    asset.extension()
                ),
            });
        }
        let (samples, rate) = decode_wav(&asset.digest, &p.read_asset(asset)?)?;
        baseline_audio_features(&samples, rate, &self.frames)
    }
}

/// Per-asset features of one project, in asset order.
#[derive(Debug, Clone, PartialEq)]
pub struct MediaFeatures {
    pub images: Vec<(String, Vec<f64>)>,
    pub sounds: Vec<(String, FeatureMatrix)>,
    pub image_source: Provenance,
    pub sound_source: Provenance,
}

impl Default for MediaFeatures {
    fn default() -> Self {
        Self {
            images: Vec::new(),
            sounds: Vec::new(),
            image_source: Provenance::None,
            sound_source: Provenance::None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ModalityScores {
    pub fluency: f64,
    pub flexibility: f64,
    pub originality: f64,
}

fn image_concepts(f: &MediaFeatures) -> Result<Vec<Concept>> {
    f.images
        .iter()
        .map(|(d, v)| Concept::vector(d.clone(), v.clone()))
        .collect()
}

fn sound_concepts(f: &MediaFeatures) -> Vec<Concept> {
    f.sounds
        .iter()
        .map(|(d, m)| Concept::matrix(d.clone(), m.clone()))
        .collect()
}

fn unique_by_id(concepts: &[Concept]) -> Vec<Concept> {
    let mut seen = HashSet::new();
    concepts
        .iter()
        .filter(|c| seen.insert(c.id.clone()))
        .cloned()
        .collect()
}

/// Mean distance over all pairs of one concept of `own` and one concept of
/// any sample member; 0 when there is no such pair.
fn pooled_mean<M: DistanceMetric>(own: &[Concept], sample: &[Vec<Concept>], metric: &M) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for x in own {
        for other in sample {
            for y in other {
                sum += metric.distance(x, y)?;
                n += 1;
            }
        }
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

fn score<M: DistanceMetric>(
    own: Vec<Concept>,
    sample: &[Vec<Concept>],
    metric: &M,
    cfg: &MeasureConfig,
) -> Result<ModalityScores> {
    if own.is_empty() {
        return Ok(ModalityScores::default());
    }
    let all = Product::from_concepts(own.clone())?;
    let fluency = measures::fluency(&all, metric, cfg)?;
    // duplicates are exact duplicates of an asset (same digest)
    let distinct = if cfg.dedup {
        Product::from_concepts(unique_by_id(&own))?
    } else {
        all
    };
    let plain = MeasureConfig { dedup: false, ..*cfg };
    let flexibility = measures::flexibility(&distinct, metric, &plain)?;
    let originality = if cfg.squared {
        pooled_mean(&own, sample, &crate::concept::Squared(metric))?
    } else {
        pooled_mean(&own, sample, metric)?
    };
    Ok(ModalityScores {
        fluency,
        flexibility,
        originality,
    })
}

/// Image count, cosine flexibility, and mean cosine distance to the
/// sample's images.
pub fn visual_scores(p: &MediaFeatures, sample: &[&MediaFeatures], cfg: &MeasureConfig) -> Result<ModalityScores> {
    let sample: Vec<Vec<Concept>> = sample.iter().map(|s| image_concepts(s)).collect::<Result<_>>()?;
    score(image_concepts(p)?, &sample, &CosineMetric, cfg)
}

/// Summed feature norms, matrix-distance flexibility, and mean matrix
/// distance to the sample's sounds. All zero for projects without sounds.
pub fn audio_scores(p: &MediaFeatures, sample: &[&MediaFeatures], cfg: &MeasureConfig) -> Result<ModalityScores> {
    let sample: Vec<Vec<Concept>> = sample.iter().map(|s| sound_concepts(s)).collect();
    score(sound_concepts(p), &sample, &MatrixMetric, cfg)
}

pub fn visual_creativity(p: &Sb3Project, store: &FeatureStore, sample: &[&Sb3Project]) -> Result<ModalityScores> {
    let own = store.project_features(p)?;
    let sample: Vec<MediaFeatures> = sample.iter().map(|s| store.project_features(s)).collect::<Result<_>>()?;
    let refs: Vec<&MediaFeatures> = sample.iter().collect();
    visual_scores(&own, &refs, &MeasureConfig::visual())
}

pub fn audio_creativity(p: &Sb3Project, store: &FeatureStore, sample: &[&Sb3Project]) -> Result<ModalityScores> {
    let own = store.project_features(p)?;
    let sample: Vec<MediaFeatures> = sample.iter().map(|s| store.project_features(s)).collect::<Result<_>>()?;
    let refs: Vec<&MediaFeatures> = sample.iter().collect();
    audio_scores(&own, &refs, &MeasureConfig::audio())
}

/// Copies every asset of `p` to `dir` as `<digest>.<ext>`, skipping files
/// that already exist. Returns the number of files written.
pub fn export_assets(p: &Sb3Project, dir: &Path) -> Result<usize> {
    fs::create_dir_all(dir)?;
    let mut written = 0;
    for asset in p.images.iter().chain(&p.sounds) {
        let path = dir.join(&asset.filename);
        if !path.exists() {
            fs::write(&path, p.read_asset(asset)?)?;
            written += 1;
        }
    }
    Ok(written)
}

/// Writes baseline sidecars for every asset of `p` that has none in `dir`.
pub fn extract_baseline(p: &Sb3Project, dir: &Path, frames: &AudioFrameConfig) -> Result<usize> {
    let store = FeatureStore {
        dir: None,
        fallback: true,
        frames: frames.clone(),
    };
    let features = store.project_features(p)?;
    let mut written = 0;
    for (digest, v) in &features.images {
        if !sidecar_path(dir, digest).exists() {
            let m = FeatureMatrix::new(1, v.len(), v.clone())?;
            FeatureSidecar::new(digest.clone(), FeatureKind::Image, m)?.write(dir)?;
            written += 1;
        }
    }
    for (digest, m) in &features.sounds {
        if !sidecar_path(dir, digest).exists() {
            FeatureSidecar::new(digest.clone(), FeatureKind::Audio, m.clone())?.write(dir)?;
            written += 1;
        }
    }
    Ok(written)
}

/// Runs an external extractor as
/// `<program> extract --in <assets> --out <sidecars> [--images] [--sounds]`.
pub fn run_adapter(
    program: &Path,
    assets: &Path,
    out: &Path,
    kinds: &[AssetKind],
) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut cmd = Command::new(program);
    cmd.arg("extract").arg("--in").arg(assets).arg("--out").arg(out);
    if kinds.contains(&AssetKind::Image) {
        cmd.arg("--images");
    }
    if kinds.contains(&AssetKind::Sound) {
        cmd.arg("--sounds");
    }
    let output = cmd.output()?;
    if !output.status.success() {
        return Err(Error::Io(std::io::Error::other(format!(
            "{} exited with {}: {}",
            program.display(),
            output.status,
            String::from_utf8_lossy(&output.stderr).trim()
        ))));
    }
    Ok(())
}
