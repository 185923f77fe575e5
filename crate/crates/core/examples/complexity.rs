//! Word operations per op and per tree level as the set grows. The ratio
//! column should stay flat.
//!
//! cargo run --release --example complexity

use dynfusion::harness::{self, BenchConfig};
use dynfusion::FusionTree;

fn main() -> dynfusion::Result<()> {
    let cfg = BenchConfig {
        samples: 300,
        ..BenchConfig::new(65536, 16, vec![1_000, 10_000, 100_000])
    };
    let table = harness::bench(&cfg, "fusion W=65536 k=16", FusionTree::new(65536, 16)?)?;
    println!("{table}");
    for &n in &cfg.sizes {
        println!("n = {n:>7}: mixed ratio {:.1}", table.mixed_ratio(n).unwrap_or(0.0));
    }
    Ok(())
}
