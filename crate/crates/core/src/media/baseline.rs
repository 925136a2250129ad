//! Built-in feature extractors used when no sidecar is available.

use std::io::Cursor;

use image::RgbImage;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::concept::FeatureMatrix;
use crate::error::{Error, Result};

pub const IMAGE_BINS_PER_CHANNEL: usize = 8;
pub const IMAGE_EMBEDDING_DIM: usize = IMAGE_BINS_PER_CHANNEL.pow(3);
pub const AUDIO_FEATURES: [&str; 6] = [
    "log_energy",
    "zero_crossing_rate",
    "spectral_centroid",
    "spectral_rolloff",
    "spectral_flux",
    "spectral_entropy",
];
/// Energies below this level (dB relative to full scale) count as silence.
pub const ENERGY_FLOOR_DB: f64 = -100.0;
pub const ROLLOFF_FRACTION: f64 = 0.85;

/// Normalized 8x8x8 RGB histogram.
pub fn baseline_image_embedding(img: &RgbImage) -> Result<Vec<f64>> {
    let n = img.width() as usize * img.height() as usize;
    if n == 0 {
        return Err(Error::Decode {
            digest: String::new(),
            message: "empty image".into(),
        });
    }
    let shift = 8 - IMAGE_BINS_PER_CHANNEL.trailing_zeros();
    let b = IMAGE_BINS_PER_CHANNEL;
    let mut hist = vec![0.0; IMAGE_EMBEDDING_DIM];
    for px in img.pixels() {
        let [r, g, bl] = px.0.map(|c| (c >> shift) as usize);
        hist[(r * b + g) * b + bl] += 1.0;
    }
    for h in &mut hist {
        *h /= n as f64;
    }
    Ok(hist)
}

pub fn decode_image(digest: &str, bytes: &[u8]) -> Result<RgbImage> {
    image::load_from_memory(bytes)
        .map(|i| i.to_rgb8())
        .map_err(|e| Error::Decode {
            digest: digest.to_string(),
            message: e.to_string(),
        })
}

/// Window length per sample rate. Rates not in the table use the entry of
/// the nearest listed rate (the lower one on ties).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioFrameConfig {
    pub table: Vec<(u32, usize)>,
    /// Fixed window for every rate, overriding the table.
    pub window: Option<usize>,
    /// Hop between windows; defaults to the window length.
    pub step: Option<usize>,
}

impl Default for AudioFrameConfig {
    fn default() -> Self {
        Self {
            table: vec![(11025, 220), (22050, 220), (24000, 220), (44100, 250), (48000, 250)],
            window: None,
            step: None,
        }
    }
}

impl AudioFrameConfig {
    pub fn window_for(&self, rate: u32) -> usize {
        if let Some(w) = self.window {
            return w;
        }
        self.table
            .iter()
            .min_by_key(|(r, _)| (r.abs_diff(rate), *r))
            .map_or(250, |&(_, w)| w)
    }

    pub fn step_for(&self, rate: u32) -> usize {
        self.step.unwrap_or_else(|| self.window_for(rate))
    }
}

/// Decodes PCM WAV to mono samples in `[-1, 1]`, averaging channels.
pub fn decode_wav(digest: &str, bytes: &[u8]) -> Result<(Vec<f64>, u32)> {
    let bad = |e: hound::Error| Error::Decode {
        digest: digest.to_string(),
        message: e.to_string(),
    };
    let reader = hound::WavReader::new(Cursor::new(bytes)).map_err(bad)?;
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let interleaved: Vec<f64> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(bad)?,
        hound::SampleFormat::Int => {
            let scale = (1u64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(bad)?
        }
    };
    let mono = interleaved
        .chunks(channels)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    Ok((mono, spec.sample_rate))
}

/// Framewise short-term features, one row per window, columns as in
/// [`AUDIO_FEATURES`]. Log-energy is reported in dB above
/// [`ENERGY_FLOOR_DB`], so silence is 0.
pub fn baseline_audio_features(
    samples: &[f64],
    rate: u32,
    cfg: &AudioFrameConfig,
) -> Result<FeatureMatrix> {
    let window = cfg.window_for(rate);
    let step = cfg.step_for(rate).max(1);
    if rate == 0 || window == 0 || samples.len() < window {
        return Err(Error::AudioTooShort {
            len: samples.len(),
            window,
        });
    }
    let frames = (samples.len() - window) / step + 1;
    let hann: Vec<f64> = (0..window)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / window as f64).cos())
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(window);
    let bins = window / 2 + 1;
    let bin_hz = rate as f64 / window as f64;

    let mut data = Vec::with_capacity(frames * AUDIO_FEATURES.len());
    let mut prev: Option<Vec<f64>> = None;
    let mut buf = vec![Complex::new(0.0, 0.0); window];
    for t in 0..frames {
        let x = &samples[t * step..t * step + window];

        let mean_sq = x.iter().map(|v| v * v).sum::<f64>() / window as f64;
        let db = if mean_sq > 0.0 {
            (10.0 * mean_sq.log10()).max(ENERGY_FLOOR_DB)
        } else {
            ENERGY_FLOOR_DB
        };
        let energy = db - ENERGY_FLOOR_DB;

        let crossings = x
            .windows(2)
            .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
            .count();
        let zcr = crossings as f64 / (window - 1).max(1) as f64;

        for (b, (&v, &h)) in buf.iter_mut().zip(x.iter().zip(&hann)) {
            *b = Complex::new(v * h, 0.0);
        }
        fft.process(&mut buf);
        let power: Vec<f64> = buf[..bins].iter().map(|c| c.norm_sqr()).collect();
        let total: f64 = power.iter().sum();
        let dist: Vec<f64> = if total > 0.0 {
            power.iter().map(|p| p / total).collect()
        } else {
            vec![0.0; bins]
        };

        let centroid: f64 = dist.iter().enumerate().map(|(k, p)| k as f64 * bin_hz * p).sum();
        let mut rolloff = 0.0;
        if total > 0.0 {
            let mut acc = 0.0;
            for (k, p) in dist.iter().enumerate() {
                acc += p;
                if acc >= ROLLOFF_FRACTION {
                    rolloff = k as f64 * bin_hz;
                    break;
                }
            }
        }
        let flux = prev.as_ref().map_or(0.0, |q| {
            q.iter()
                .zip(&dist)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        });
        let entropy: f64 = -dist
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.log2())
            .sum::<f64>();

        data.extend([energy, zcr, centroid, rolloff, flux, entropy.max(0.0)]);
        prev = Some(dist);
    }
    FeatureMatrix::new(frames, AUDIO_FEATURES.len(), data)
}
