//! Ranks a query among eight sorted 7-bit fields with one subtraction.
//!
//! cargo run --example packed_rank

use dynfusion::wordops::packed_rank;
use dynfusion::{Word, WordContext};

fn main() -> dynfusion::Result<()> {
    let ctx = WordContext::new(64)?;
    let (f, fields) = (8, [3u64, 9, 9, 20, 41, 64, 100, 127]);
    let packed = Word::from_u64(64, fields.iter().rev().fold(0, |acc, &v| acc << f | v));
    println!("packed  = {packed}");
    for x in [0u64, 9, 10, 63, 127] {
        ctx.reset_ops();
        let r = packed_rank(&ctx, &Word::from_u64(64, x), &packed, fields.len(), f)?;
        let expect = fields.iter().filter(|&&v| v < x).count();
        assert_eq!(r, expect);
        println!("rank({x:>3}) = {r}  ({} ops)", ctx.ops());
    }
    Ok(())
}
