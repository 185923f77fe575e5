//! Fuzzes the tree against the oracle, then shows how a planted bug is
//! caught and shrunk to a few ops.
//!
//! cargo run --release --example differential_fuzz

use dynfusion::harness::{self, fuzz_with, FuzzConfig, Pattern, Subject};
use dynfusion::{OracleSet, OrderedSet, Result, Word};

/// Answers rank off by one once it holds more than four keys.
struct OffByOne(OracleSet);

impl OrderedSet for OffByOne {
    fn width(&self) -> u32 {
        self.0.width()
    }
    fn len(&self) -> u64 {
        self.0.len()
    }
    fn insert(&mut self, x: &Word) -> Result<bool> {
        self.0.insert(x)
    }
    fn delete(&mut self, x: &Word) -> Result<bool> {
        self.0.delete(x)
    }
    fn member(&self, x: &Word) -> Result<bool> {
        self.0.member(x)
    }
    fn rank(&self, x: &Word) -> Result<u64> {
        Ok(self.0.rank(x)? + u64::from(self.0.len() > 4))
    }
    fn select(&self, r: u64) -> Result<Word> {
        self.0.select(r)
    }
    fn predecessor(&self, x: &Word) -> Result<Option<Word>> {
        self.0.predecessor(x)
    }
    fn successor(&self, x: &Word) -> Result<Option<Word>> {
        self.0.successor(x)
    }
}

impl Subject for OffByOne {}

fn main() -> Result<()> {
    let cfg = FuzzConfig {
        seed: 42,
        ops: 20_000,
        pattern: Pattern::Clustered,
        ..FuzzConfig::new(4096, 8)
    };
    let report = harness::fuzz(&cfg)?;
    println!("{report}\n({:.0} ops/sec)\n", report.ops_per_sec());

    let planted = fuzz_with(&FuzzConfig { keybits: 8, ..cfg }, &|| Ok(OffByOne(OracleSet::new(4096))))?;
    println!("{planted}");
    if let Some(fail) = planted.failure {
        print!("{}", fail.trace);
    }
    Ok(())
}
