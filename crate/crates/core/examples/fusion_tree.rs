//! An ordered set of 64-bit keys in 65536-bit words. Reports height, the
//! per-level cost of queries and the longest select scan.
//!
//! cargo run --release --example fusion_tree

use dynfusion::{FusionTree, OrderedSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dynfusion::Result<()> {
    let mut tree = FusionTree::new(65536, 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50_000 {
        tree.insert(&tree.word(rng.gen()))?;
    }
    // Churn, so nodes split and merge.
    for _ in 0..20_000 {
        let x = tree.select(rng.gen_range(0..tree.len()))?;
        tree.delete(&x)?;
        tree.insert(&tree.word(rng.gen()))?;
    }
    let stats = tree.audit(true)?;
    println!(
        "n = {}, height = {}, nodes = {}, balance = {:?}",
        tree.len(),
        stats.height,
        stats.nodes,
        tree.balance()
    );

    let x = tree.word(rng.gen());
    let ctx = tree.ctx();
    ctx.reset_ops();
    let pred = tree.predecessor(&x)?;
    let succ = tree.successor(&x)?;
    let rank = tree.rank(&x)?;
    println!("pred = {pred:?}\nsucc = {succ:?}\nrank = {rank}");
    println!("{:.1} word ops per query per level", ctx.ops() as f64 / 3.0 / tree.height() as f64);

    tree.reset_select_scan();
    for r in 0..tree.len() {
        tree.select(r)?;
    }
    println!("longest select scan: {}", tree.max_select_scan());
    Ok(())
}
