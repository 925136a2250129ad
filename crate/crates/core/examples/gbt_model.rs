//! Fits a boosted regression tree model, saves it in the text format and
//! ranks held-out points with Kendall's tau.
//!
//! cargo run --example gbt_model

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scratch_creativity::rank::{fit_gbt, kendall_tau, predict, GbtModel, GbtParams, TauVariant};

fn main() -> scratch_creativity::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points: Vec<Vec<f64>> = (0..60).map(|_| (0..3).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
    let y: Vec<f64> = points.iter().map(|x| 0.5 * x[0] + 0.3 * x[1] + 0.2 * x[2]).collect();
    let (train, test) = points.split_at(45);
    let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let model = fit_gbt(train, &y[..45], &names, &GbtParams { n_trees: 29, max_depth: 3, shrinkage: 0.3 })?;

    let text = model.to_text();
    println!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n"));
    let model: GbtModel = text.parse()?;
    let pred = test.iter().map(|x| predict(&model, x)).collect::<scratch_creativity::Result<Vec<_>>>()?;
    println!("held-out tau {:.3}", kendall_tau(&pred, &y[45..], TauVariant::B)?);
    Ok(())
}
