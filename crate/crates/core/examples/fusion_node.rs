//! A single fusion node at W = 4096, k = 8: fill it, query it, drain it,
//! and show the cost of each operation.
//!
//! cargo run --example fusion_node

use dynfusion::{FusionNode, WordContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dynfusion::Result<()> {
    let ctx = WordContext::new(4096)?;
    let mut node = FusionNode::new(4096, 8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let keys: Vec<_> = (0..8).map(|_| ctx.word(rng.gen::<u64>() >> rng.gen_range(0..40))).collect();

    for x in &keys {
        ctx.reset_ops();
        node.insert(&ctx, x)?;
        println!("insert {x:>18}: {:>3} ops", ctx.ops());
    }
    node.audit()?;
    println!("\n{node}\nbranch counts: {:?}\n", node.branch_counts());

    let probe = ctx.word(rng.gen());
    ctx.reset_ops();
    let r = node.rank(&ctx, &probe);
    println!("rank({probe}) = {r}: {} ops", ctx.ops());
    ctx.reset_ops();
    let top = node.select(&ctx, node.len() - 1)?;
    println!("select({}) = {top}: {} ops", node.len() - 1, ctx.ops());

    for x in &keys {
        ctx.reset_ops();
        node.delete(&ctx, x);
        println!("delete {x:>18}: {:>3} ops", ctx.ops());
    }
    assert!(node.is_empty());
    Ok(())
}
