//! Baseline image and audio features, written to and read back from
//! `.cfv` sidecars.
//!
//! cargo run --example media_features

use image::{Rgb, RgbImage};
use scratch_creativity::media::{
    baseline_audio_features, baseline_image_embedding, load_sidecar, AudioFrameConfig, FeatureKind, FeatureSidecar,
    AUDIO_FEATURES,
};
use scratch_creativity::concept::FeatureMatrix;

fn main() -> scratch_creativity::Result<()> {
    let img = RgbImage::from_fn(32, 32, |x, _| if x < 16 { Rgb([255, 0, 0]) } else { Rgb([0, 0, 255]) });
    let emb = baseline_image_embedding(&img)?;
    let hot: Vec<(usize, f64)> = emb.iter().copied().enumerate().filter(|(_, v)| *v > 0.0).collect();
    println!("image embedding, {} dims, non-zero {:?}", emb.len(), hot);

    let rate = 22050;
    let tone: Vec<f64> = (0..rate / 2)
        .map(|i| 0.5 * (std::f64::consts::TAU * 440.0 * i as f64 / rate as f64).sin())
        .collect();
    let m = baseline_audio_features(&tone, rate, &AudioFrameConfig::default())?;
    println!("audio features {} frames x {} columns", m.rows(), m.cols());
    for (name, v) in AUDIO_FEATURES.iter().zip(m.row(0)) {
        println!("  {name:<10} {v:.3}");
    }

    let dir = std::env::temp_dir().join("media-features-example");
    std::fs::create_dir_all(&dir)?;
    let side = FeatureSidecar::new("0123abcd", FeatureKind::Image, FeatureMatrix::new(1, emb.len(), emb)?)?;
    side.write(&dir)?;
    let back = load_sidecar(&dir, "0123abcd")?;
    println!("sidecar round trip ok: {}", back == side);
    Ok(())
}
