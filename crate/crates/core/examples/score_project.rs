//! Parses generated `.sb3` projects and scores the first one on all nine
//! features against the others.
//!
//! cargo run --example score_project [project.sb3 ...]

use std::path::PathBuf;

use scratch_creativity::measures::MeasureConfig;
use scratch_creativity::media::{audio_creativity, visual_creativity, FeatureStore};
use scratch_creativity::scratch::{code_creativity, parse_sb3, ProjectSummary};
use scratch_creativity::synth::write_synthetic_corpus;

fn main() -> scratch_creativity::Result<()> {
    let mut paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        paths = write_synthetic_corpus(std::env::temp_dir().join("score-project-example"), 5, 7)?;
    }
    let projects = paths.iter().map(parse_sb3).collect::<scratch_creativity::Result<Vec<_>>>()?;
    let (p, rest) = projects.split_first().expect("at least one project");
    let sample: Vec<_> = rest.iter().collect();
    print!("{}", ProjectSummary::of(p).to_text());

    let store = FeatureStore::baseline();
    let code = code_creativity(p, &sample, &MeasureConfig::code())?;
    let visual = visual_creativity(p, &store, &sample)?;
    let audio = audio_creativity(p, &store, &sample)?;
    println!("code   {:>12.3} {:>12.3} {:>12.3}", code.fluency, code.flexibility, code.originality.unwrap_or(0.0));
    println!("visual {:>12.3} {:>12.3} {:>12.3}", visual.fluency, visual.flexibility, visual.originality);
    println!("audio  {:>12.3} {:>12.3} {:>12.3}", audio.fluency, audio.flexibility, audio.originality);
    Ok(())
}
