//! Builds the five-key node from the classic fusion-node figure and prints
//! its don't-care patterns, compressed keys and a few queries.
//!
//! cargo run --example figure1

use std::sync::Arc;

use dynfusion::{FusionNode, NodeLayout, WordContext};

fn main() -> dynfusion::Result<()> {
    let ctx = WordContext::new(256)?;
    // Five keys need capacity k + 1 with k = 4.
    let mut node = FusionNode::with_layout(Arc::new(NodeLayout::with_capacity(256, 4, 5)?));
    for key in [0xDA, 0x91, 0xFA, 0x92, 0xD2] {
        node.insert(&ctx, &ctx.word(key))?;
    }
    node.audit()?;

    println!("{node}");
    println!("significant positions: {:?}", node.compressor().positions());
    for key in node.keys() {
        let c = node.compressor().compress(&ctx, &key);
        println!("  {key:>6} -> {:04b}", c.low_u64());
    }

    let q = ctx.word(0xC0);
    ctx.reset_ops();
    let r = node.rank(&ctx, &q);
    println!("rank({q}) = {r} in {} word ops", ctx.ops());
    println!("select(2) = {}", node.select(&ctx, 2)?);
    Ok(())
}
