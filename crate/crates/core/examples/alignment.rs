//! Optimal alignments: Hungarian assignment, null-padded product alignment,
//! and tree and sequence edit distances over a small symbol metric.
//!
//! cargo run --example alignment

use scratch_creativity::align::{alignment_distance, hungarian, sequence_edit_distance, tree_edit_distance, LabeledTree};
use scratch_creativity::concept::{Concept, DiscreteMetric, Product, SemanticNetwork};

fn tree(label: &str, children: Vec<LabeledTree>) -> LabeledTree {
    LabeledTree::new(Concept::symbol(label), children)
}

fn main() -> scratch_creativity::Result<()> {
    let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
    let a = hungarian(&cost)?;
    println!("assignment {:?} total {}", a.pairs, a.total);

    let net = SemanticNetwork::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/shapes.net"))?;
    let figure = Product::from_symbols(["circ", "sq", "tri", "tri", "tri", "tri"]);
    let house = Product::from_symbols(["tri", "sq"]);
    let (d, al) = alignment_distance(&figure, &house, &net)?;
    println!("figure vs house {d}");
    for p in &al.pairs {
        let name = |prod: &Product, i: Option<usize>| i.map_or("0".to_string(), |i| prod.concepts()[i].id.clone());
        println!("  {} <-> {}", name(&figure, p.left), name(&house, p.right));
    }

    let t1 = tree("a", vec![tree("b", vec![]), tree("c", vec![tree("d", vec![])])]);
    let t2 = tree("a", vec![tree("c", vec![tree("d", vec![])])]);
    println!("tree edit distance {}", tree_edit_distance(&t1, &t2, &DiscreteMetric)?);

    let word = |s: &str| s.chars().map(|c| Concept::symbol(c.to_string())).collect::<Vec<_>>();
    println!(
        "kitten -> sitting {}",
        sequence_edit_distance(&word("kitten"), &word("sitting"), &DiscreteMetric)?
    );
    Ok(())
}
