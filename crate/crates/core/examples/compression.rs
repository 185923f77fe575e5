//! Adds and removes significant positions on a 4096-bit compressor and
//! extracts them from a key.
//!
//! cargo run --example compression

use dynfusion::{Compressor, Word, WordContext};

fn main() -> dynfusion::Result<()> {
    let ctx = WordContext::new(4096)?;
    let mut comp = Compressor::new(4096, 8)?;
    for c in [4000, 7, 1500, 1501, 64, 2048] {
        ctx.reset_ops();
        let h = comp.add_position(&ctx, c)?;
        println!("add {c:>4} at column {h} ({} ops)", ctx.ops());
    }
    comp.remove_position(&ctx, 1501)?;
    comp.audit()?;
    println!("{comp}");

    let key = Word::from_bit_positions(4096, [7, 64, 2048, 3000]);
    ctx.reset_ops();
    let c = comp.compress(&ctx, &key);
    println!("key bits {:?} compress to {:05b} in {} ops", key.set_bits(), c.low_u64(), ctx.ops());
    Ok(())
}
