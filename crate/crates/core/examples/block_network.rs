//! Distances between Scratch blocks: the closed form over the block
//! taxonomy next to shortest paths in the materialized network.
//!
//! cargo run --example block_network

use std::collections::HashSet;

use scratch_creativity::scratch::{block_distance, block_network, block_node_id, classify_block, BlockConcept};

fn main() -> scratch_creativity::Result<()> {
    let none = HashSet::new();
    let blocks = [
        BlockConcept::new("motion_movesteps"),
        BlockConcept::new("motion_turnright"),
        BlockConcept::new("event_whenkeypressed"),
        BlockConcept::new("pen_penDown"),
        BlockConcept::new("music_playDrumForBeats"),
        BlockConcept::custom("procedures_call", "jump %n"),
    ];
    for b in &blocks {
        println!("{:<28} {}", b.key(), classify_block(&b.opcode, &none));
    }
    let net = block_network(blocks.iter())?;
    println!();
    println!("{:<28} {:<28} {:>6} {:>8}", "a", "b", "closed", "network");
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            let closed = block_distance(Some(a), Some(b));
            let path = net.network_distance(&block_node_id(a), &block_node_id(b))?;
            println!("{:<28} {:<28} {closed:>6} {path:>8}", a.key(), b.key());
        }
        println!("{:<28} {:<28} {:>6}", a.key(), "(null)", block_distance(Some(a), None));
    }
    Ok(())
}
