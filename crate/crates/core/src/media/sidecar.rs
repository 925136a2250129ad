//! CFV1 feature sidecars.
//!
//! ```text
//! CFV1 <image|audio> <T> <F>
//! <F space-separated floats>     (T lines)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::concept::FeatureMatrix;
use crate::error::{Error, Result};

pub const SIDECAR_EXTENSION: &str = "cfv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Image,
    Audio,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Image => "image",
            FeatureKind::Audio => "audio",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSidecar {
    pub digest: String,
    pub kind: FeatureKind,
    pub matrix: FeatureMatrix,
}

pub fn sidecar_path(dir: &Path, digest: &str) -> PathBuf {
    dir.join(format!("{digest}.{SIDECAR_EXTENSION}"))
}

impl FeatureSidecar {
    pub fn new(digest: impl Into<String>, kind: FeatureKind, matrix: FeatureMatrix) -> Result<Self> {
        let digest = digest.into();
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(Error::Sidecar {
                digest,
                message: "feature matrix must have T >= 1 and F >= 1".into(),
            });
        }
        if kind == FeatureKind::Image && matrix.rows() != 1 {
            return Err(Error::Sidecar {
                digest,
                message: format!("image sidecars have exactly one row, got {}", matrix.rows()),
            });
        }
        Ok(Self {
            digest,
            kind,
            matrix,
        })
    }

    pub fn to_text(&self) -> String {
        let m = &self.matrix;
        let mut out = format!("CFV1 {} {} {}\n", self.kind.as_str(), m.rows(), m.cols());
        for r in 0..m.rows() {
            for (i, v) in m.row(r).iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(digest: &str, text: &str) -> Result<Self> {
        let bad = |message: String| Error::Sidecar {
            digest: digest.to_string(),
            message,
        };
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = lines.next().unwrap_or_default();
        let fields: Vec<&str> = header.split(' ').collect();
        let [magic, kind, t, f] = fields[..] else {
            return Err(bad(format!("bad header `{header}`")));
        };
        if magic != "CFV1" {
            return Err(bad(format!("unknown magic `{magic}`")));
        }
        let kind = match kind {
            "image" => FeatureKind::Image,
            "audio" => FeatureKind::Audio,
            other => return Err(bad(format!("unknown kind `{other}`"))),
        };
        let t: usize = t.parse().map_err(|_| bad(format!("bad row count `{t}`")))?;
        let f: usize = f.parse().map_err(|_| bad(format!("bad column count `{f}`")))?;
        let mut data = Vec::with_capacity(t * f);
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let before = data.len();
            for tok in line.split(' ') {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| bad(format!("row {}: `{tok}` is not a number", i + 1)))?;
                if !v.is_finite() {
                    return Err(bad(format!("row {}: non-finite value", i + 1)));
                }
                data.push(v);
            }
            if data.len() - before != f {
                return Err(bad(format!(
                    "row {} has {} values, header says {f}",
                    i + 1,
                    data.len() - before
                )));
            }
            rows += 1;
        }
        if rows != t {
            return Err(bad(format!("{rows} rows, header says {t}")));
        }
        let matrix = FeatureMatrix::new(t, f, data).map_err(|e| bad(e.to_string()))?;
        Self::new(digest, kind, matrix)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = sidecar_path(dir, &self.digest);
        fs::write(&path, self.to_text())?;
        Ok(path)
    }
}

/// Loads `<dir>/<digest>.cfv`. A missing file is reported as
/// [`Error::MissingFeatures`] so callers can fall back to a baseline.
pub fn load_sidecar(dir: &Path, digest: &str) -> Result<FeatureSidecar> {
    match fs::read_to_string(sidecar_path(dir, digest)) {
        Ok(text) => FeatureSidecar::parse(digest, &text),
        Err(e) if e.kind() == ErrorKind::NotFound => {
            Err(Error::MissingFeatures(vec![digest.to_string()]))
        }
        Err(e) => Err(e.into()),
    }
}
