//! Writes a synthetic corpus of tiny projects and prints a summary of each.
//!
//! cargo run --example synth_corpus [dir] [n]

use scratch_creativity::scratch::parse_sb3;
use scratch_creativity::synth::write_synthetic_corpus;

fn main() -> scratch_creativity::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().map_or_else(|| std::env::temp_dir().join("synth-corpus-example"), Into::into);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);
    for path in write_synthetic_corpus(&dir, n, 1)? {
        let p = parse_sb3(&path)?;
        println!(
            "{}: {} sprites, {} blocks, {} images, {} sounds",
            path.display(),
            p.sprites.len(),
            p.block_count(),
            p.images.len(),
            p.sounds.len()
        );
    }
    Ok(())
}
