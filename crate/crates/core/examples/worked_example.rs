//! Fluency, flexibility and originality of a small drawing made of shapes,
//! with distances read from a semantic network file.
//!
//! cargo run --example worked_example

use scratch_creativity::concept::{Product, SemanticNetwork};
use scratch_creativity::measures::{flexibility, fluency, originality, MeasureConfig, ProductDistance};

fn main() -> scratch_creativity::Result<()> {
    let net = SemanticNetwork::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/shapes.net"))?;
    let cfg = MeasureConfig::new(false, false, ProductDistance::Alignment);
    let figure = Product::from_symbols(["circ", "sq", "tri", "tri", "tri", "tri"]);
    let house = Product::from_symbols(["tri", "sq"]);

    println!("fluency     {}", fluency(&figure, &net, &cfg)?);
    println!("flexibility {}", flexibility(&figure, &net, &cfg)?);
    println!("originality {}", originality(&figure, &[house], &net, &cfg)?);

    let dedup = MeasureConfig { dedup: true, ..cfg };
    println!("flexibility, duplicates removed {}", flexibility(&figure, &net, &dedup)?);
    Ok(())
}
