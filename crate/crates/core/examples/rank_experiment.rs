//! Builds a 45-project synthetic corpus, labels it with a noiseless linear
//! function of the nine features and cross-validates the rank models.
//!
//! cargo run --release --example rank_experiment [seed]

use scratch_creativity::measures::MeasureConfig;
use scratch_creativity::media::FeatureStore;
use scratch_creativity::rank::{evaluate, synthetic_labels, Mode, Protocol, ScoredCorpus, Target, DEFAULT_SEED};
use scratch_creativity::scratch::parse_sb3;
use scratch_creativity::synth::{expert_assignment, write_synthetic_corpus};

fn main() -> scratch_creativity::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let dir = std::env::temp_dir().join(format!("rank-experiment-{seed}"));
    let projects = write_synthetic_corpus(&dir, 45, seed)?
        .iter()
        .map(parse_sb3)
        .collect::<scratch_creativity::Result<Vec<_>>>()?;
    let corpus = ScoredCorpus::build(&projects, &FeatureStore::baseline(), &MeasureConfig::code())?;
    let labels = synthetic_labels(&corpus, &expert_assignment(45, seed)?, seed)?;
    let report = evaluate(
        &corpus,
        &labels,
        &[Mode::PerExpert, Mode::Combined],
        &Target::ALL,
        &Protocol::default(),
        seed,
    )?;
    print!("{}", report.to_table());
    for e in &report.entries {
        println!("{:<10} {:<8} mean tau {:?}", e.mode.as_str(), e.target.as_str(), e.mean_tau);
    }
    Ok(())
}
