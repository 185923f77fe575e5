//! Dynamic fusion nodes and fusion trees on a simulated word RAM.
//!
//! Words of any power-of-two width `W` are simulated by [`Word`]; every
//! primitive applied through a [`WordContext`] is counted, so the constant
//! per-node cost of the structures can be measured directly.
//!
//! * [`Compressor`]: keeps a small set of significant bit positions and
//!   extracts them from any key in a constant number of operations.
//! * [`FusionNode`]: a sorted set of at most `k` keys with rank, select,
//!   insert and delete in a constant number of operations.
//! * [`FusionTree`]: an unbounded set built from fusion nodes, with
//!   `O(log n / log k)` operations per query or update.
//! * [`OracleSet`]: a sorted array with the same interface, for testing.
//! * [`trace`] and [`harness`]: replayable op traces, differential fuzzing
//!   and word-op benchmarks.

pub mod compressor;
pub mod error;
pub mod fusion_node;
pub mod fusion_tree;
pub mod harness;
pub mod oracle;
pub mod trace;
pub mod word;
pub mod wordops;

pub use compressor::{default_k, Compressor};
pub use error::{Error, Result};
pub use fusion_node::{FusionNode, NodeLayout};
pub use fusion_tree::{Balance, FusionTree, TreeStats};
pub use oracle::OracleSet;
pub use trace::{Op, OpKind, OpTrace};
pub use word::{ArithOp, BitOp, ShiftDir, Word, WordContext};

/// The seven operations shared by [`FusionTree`] and [`OracleSet`].
///
/// `rank(x)` counts keys strictly below `x`; `predecessor(x)` is the largest
/// key below `x` and `successor(x)` the smallest key at or above `x`.
pub trait OrderedSet {
    fn width(&self) -> u32;
    fn len(&self) -> u64;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Adds `x`; false if it was already present.
    fn insert(&mut self, x: &Word) -> Result<bool>;
    /// Removes `x`; false if it was absent.
    fn delete(&mut self, x: &Word) -> Result<bool>;
    fn member(&self, x: &Word) -> Result<bool>;
    fn rank(&self, x: &Word) -> Result<u64>;
    /// The key of rank `r`, counting from zero.
    fn select(&self, r: u64) -> Result<Word>;
    fn predecessor(&self, x: &Word) -> Result<Option<Word>>;
    fn successor(&self, x: &Word) -> Result<Option<Word>>;
}
