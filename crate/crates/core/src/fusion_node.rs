//! The dynamic fusion node: a sorted set of at most `k` keys with rank,
//! select, insert and delete in a constant number of word operations.
//!
//! The node simulates search in the compressed binary trie of its keys.
//! Compressed keys keep only the significant bits (the trie's branching
//! levels). Row `i` of the bit matrices `BRANCH` and `FREE` describes the
//! key of rank `i`: a column is cared for if the trie has a branch node at
//! that level on the key's root-to-leaf path, and `BRANCH` then holds the
//! key's bit there. Everything else is a don't care, recorded in `FREE`.
//! Filling the don't cares of every row with the query's own bits gives
//! sorted rows, one of which equals the query: that row is the query's
//! match.

use std::fmt;
use std::sync::Arc;

use crate::compressor::{Compressor, CompressorLayout};
use crate::error::{Error, Result};
use crate::word::{Word, WordContext};
use crate::wordops::{self, PackedRanker};

/// Shared geometry and masks for nodes with the same `(W, k, capacity)`.
#[derive(Debug)]
pub struct NodeLayout {
    width: u32,
    k: usize,
    capacity: usize,
    /// `k + 1` bits per row: `k` compressed-key columns and a sentinel.
    row_width: u32,
    index_field: u32,
    count_field: u32,
    comp: Arc<CompressorLayout>,
    rows: PackedRanker,
    /// `cols_from[h]`: columns `h..=k` of every row.
    cols_from: Vec<Word>,
    /// `cols_below[h]`: columns `0..h` of every row.
    cols_below: Vec<Word>,
    /// `col[h]`: column `h` of every row.
    col: Vec<Word>,
}

impl NodeLayout {
    /// Layout for nodes holding up to `k` keys.
    pub fn new(width: u32, k: usize) -> Result<NodeLayout> {
        NodeLayout::with_capacity(width, k, k)
    }

    /// Layout with an explicit capacity between 1 and `k + 1`. The
    /// compressor holds up to `k` positions, which is what `k + 1` keys can
    /// need.
    pub fn with_capacity(width: u32, k: usize, capacity: usize) -> Result<NodeLayout> {
        let comp = Arc::new(CompressorLayout::new(width, k)?);
        if capacity == 0 || capacity > k + 1 {
            return Err(Error::InvalidConfig(format!(
                "node capacity {capacity} must lie in 1..={}",
                k + 1
            )));
        }
        let row_width = k as u32 + 1;
        let bits = |v: usize| (usize::BITS - v.leading_zeros()).max(1);
        let span = |lo: u32, hi: u32| wordops::column_span(width, lo, hi, capacity, row_width);
        Ok(NodeLayout {
            width,
            k,
            capacity,
            row_width,
            index_field: bits(capacity - 1),
            count_field: bits(capacity),
            rows: PackedRanker::new(width, row_width, capacity),
            cols_from: (0..=row_width).map(|h| span(h, row_width)).collect(),
            cols_below: (0..=row_width).map(|h| span(0, h)).collect(),
            col: (0..row_width).map(|h| span(h, h + 1)).collect(),
            comp,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn row(&self, i: usize) -> u32 {
        i as u32 * self.row_width
    }

    fn cell(&self, i: usize, h: usize) -> Word {
        Word::bit(self.width, self.row(i) + h as u32)
    }

    /// Column `h` restricted to rows `lo..=hi`.
    fn column_rows(&self, h: usize, lo: usize, hi: usize) -> Word {
        self.col[h].raw_and(&Word::range_mask(self.width, self.row(lo), self.row(hi + 1)))
    }
}

/// Where an inserted or deleted key sits: its rank and its `KEY` slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub rank: usize,
    pub slot: usize,
}

/// What a match tells about a query key.
struct Located {
    xhat: Word,
    /// Rank of the matched key `y`.
    rank: usize,
    /// `msb(x ^ y)`, or `None` if `x == y`.
    level: Option<u32>,
    less: bool,
}

#[derive(Debug, Clone)]
pub struct FusionNode {
    layout: Arc<NodeLayout>,
    n: usize,
    keys: Vec<Word>,
    /// Bit `j` set iff slot `j` of `keys` is free.
    free_slots: Word,
    index: Word,
    branch: Word,
    free: Word,
    comp: Compressor,
    /// Branch nodes per compressed column, one field per column.
    counts: Word,
}

impl FusionNode {
    pub fn new(width: u32, k: usize) -> Result<FusionNode> {
        Ok(FusionNode::with_layout(Arc::new(NodeLayout::new(width, k)?)))
    }

    pub fn with_layout(layout: Arc<NodeLayout>) -> FusionNode {
        let w = layout.width;
        FusionNode {
            n: 0,
            keys: vec![Word::zero(w); layout.capacity],
            free_slots: Word::low_mask(w, layout.capacity as u32),
            index: Word::zero(w),
            branch: Word::zero(w),
            free: Word::zero(w),
            comp: Compressor::with_layout(Arc::clone(&layout.comp)),
            counts: Word::zero(w),
            layout,
        }
    }

    pub fn layout(&self) -> &Arc<NodeLayout> {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_full(&self) -> bool {
        self.n == self.layout.capacity
    }

    pub fn compressor(&self) -> &Compressor {
        &self.comp
    }

    /// The BRANCH matrix: row `i` (of `k + 1` bits) belongs to the key of
    /// rank `i` and holds its cared-for compressed bits.
    pub fn branch(&self) -> &Word {
        &self.branch
    }

    /// The FREE matrix: the don't-care cells, laid out like [`branch`](Self::branch).
    pub fn free(&self) -> &Word {
        &self.free
    }

    /// Keys in ascending order (not counted).
    pub fn keys(&self) -> Vec<Word> {
        (0..self.n).map(|i| self.keys[self.slot_raw(i)].clone()).collect()
    }

    pub(crate) fn slot_raw(&self, i: usize) -> usize {
        let f = self.layout.index_field;
        self.index.extract(i as u32 * f, f) as usize
    }

    /// The `KEY` slot holding the key of rank `i`.
    pub fn slot(&self, ctx: &WordContext, i: usize) -> Result<usize> {
        self.check_rank(i)?;
        let field = wordops::field_get(ctx, &self.index, i, self.layout.index_field)?;
        Ok(field.low_u64() as usize)
    }

    /// The key stored in `KEY` slot `slot`.
    pub fn key_in_slot(&self, slot: usize) -> &Word {
        &self.keys[slot]
    }

    fn check_rank(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::NoSuchRank {
                rank: i as u64,
                len: self.n as u64,
            });
        }
        Ok(())
    }

    /// Rank of the key whose don't-care pattern the compressed query matches.
    fn match_compressed(&self, ctx: &WordContext, xhat: &Word) -> usize {
        let l = &self.layout;
        let xs = ctx.mul(xhat, l.rows.ones(self.n));
        let filled = ctx.and(&xs, &self.free);
        let filled = ctx.or(&self.branch, &filled);
        l.rows.rank_repeated(ctx, &xs, &filled, self.n)
    }

    /// Rank of the key reached by compressed-trie search for `x`.
    pub fn match_rank(&self, ctx: &WordContext, x: &Word) -> Result<usize> {
        if self.n == 0 {
            return Err(Error::Usage("match on an empty node".into()));
        }
        let xhat = self.comp.compress(ctx, x);
        Ok(self.match_compressed(ctx, &xhat))
    }

    fn locate(&self, ctx: &WordContext, x: &Word) -> Located {
        let xhat = self.comp.compress(ctx, x);
        let rank = self.match_compressed(ctx, &xhat);
        let slot = wordops::field_get(ctx, &self.index, rank, self.layout.index_field)
            .expect("index field in range")
            .low_u64() as usize;
        let y = &self.keys[slot];
        let diff = ctx.xor(x, y);
        let level = ctx.msb(&diff);
        let less = level.is_some() && ctx.cmp(x, y).is_lt();
        Located {
            xhat,
            rank,
            level,
            less,
        }
    }

    /// Rank range of the keys below the trie edge where `x` leaves the
    /// path of its match at `level`: the smallest and largest keys that
    /// agree with `x` above `level`.
    fn subtree(&self, ctx: &WordContext, xhat: &Word, h: usize, both: (bool, bool)) -> (usize, usize) {
        let below = Word::low_mask(self.layout.width, h as u32);
        let lo = if both.0 {
            let q = ctx.and_not(xhat, &below);
            self.match_compressed(ctx, &q)
        } else {
            0
        };
        let hi = if both.1 {
            let q = ctx.or(xhat, &below);
            self.match_compressed(ctx, &q)
        } else {
            0
        };
        (lo, hi)
    }

    /// `#{y in S : y < x}`.
    pub fn rank(&self, ctx: &WordContext, x: &Word) -> usize {
        if self.n == 0 {
            return 0;
        }
        let loc = self.locate(ctx, x);
        let Some(level) = loc.level else {
            return loc.rank;
        };
        let h = self.comp.position_rank(ctx, level as u64);
        if loc.less {
            self.subtree(ctx, &loc.xhat, h, (true, false)).0
        } else {
            self.subtree(ctx, &loc.xhat, h, (false, true)).1 + 1
        }
    }

    /// The key of rank `i`.
    pub fn select(&self, ctx: &WordContext, i: usize) -> Result<Word> {
        let slot = self.slot(ctx, i)?;
        Ok(self.keys[slot].clone())
    }

    pub fn member(&self, ctx: &WordContext, x: &Word) -> bool {
        self.n > 0 && self.locate(ctx, x).level.is_none()
    }

    /// Inserts `x`; returns false if it was already present.
    pub fn insert(&mut self, ctx: &WordContext, x: &Word) -> Result<bool> {
        Ok(self.insert_entry(ctx, x)?.is_some())
    }

    /// Inserts `x` and reports its rank and slot, or `None` for a duplicate.
    pub fn insert_entry(&mut self, ctx: &WordContext, x: &Word) -> Result<Option<Entry>> {
        let l = Arc::clone(&self.layout);
        if x.width() != l.width {
            return Err(Error::WidthMismatch {
                left: x.width(),
                right: l.width,
            });
        }
        if self.n == 0 {
            let slot = self.claim_slot(ctx, x, 0);
            self.n = 1;
            return Ok(Some(Entry { rank: 0, slot }));
        }
        let loc = self.locate(ctx, x);
        let Some(level) = loc.level else {
            return Ok(None);
        };
        if self.is_full() {
            return Err(Error::Capacity {
                capacity: l.capacity,
            });
        }
        let h = self.comp.position_rank(ctx, level as u64);
        let (i0, i1) = self.subtree(ctx, &loc.xhat, h, (true, true));
        let significant = self.comp.is_significant(ctx, level);
        if !significant {
            let added = self.comp.add_position(ctx, level)?;
            debug_assert_eq!(added, h);
            // A new don't-care column h in every live row.
            self.branch = self.open_column(ctx, &self.branch, h);
            self.free = self.open_column(ctx, &self.free, h);
            let live = l.column_rows(h, 0, self.n - 1);
            self.free = ctx.or(&self.free, &live);
            self.counts = wordops::open_field(ctx, &self.counts, h, l.count_field);
        }

        // The subtree rows now branch at column h, on the side opposite x.
        let cells = l.column_rows(h, i0, i1);
        self.free = ctx.and_not(&self.free, &cells);
        if loc.less {
            self.branch = ctx.or(&self.branch, &cells);
        }

        let r = if loc.less { i0 } else { i1 + 1 };
        let adjacent = if loc.less { r + 1 } else { r - 1 };
        self.branch = wordops::open_field(ctx, &self.branch, r, l.row_width);
        self.free = wordops::open_field(ctx, &self.free, r, l.row_width);
        // Above column h the new key shares the subtree's branch nodes.
        self.branch = self.copy_row_above(ctx, &self.branch, adjacent, r, h);
        self.free = self.copy_row_above(ctx, &self.free, adjacent, r, h);
        let below = l.cols_below[h].raw_and(&Word::range_mask(l.width, l.row(r), l.row(r + 1)));
        self.free = ctx.or(&self.free, &below);
        if !loc.less {
            self.branch = ctx.or(&self.branch, &l.cell(r, h));
        }

        let one = Word::bit(l.width, h as u32 * l.count_field);
        self.counts = ctx.add(&self.counts, &one);
        self.index = wordops::open_field(ctx, &self.index, r, l.index_field);
        let slot = self.claim_slot(ctx, x, r);
        self.n += 1;
        Ok(Some(Entry { rank: r, slot }))
    }

    /// Takes the highest free slot for `x` and records it at rank `r`, whose
    /// `INDEX` field must be zero.
    fn claim_slot(&mut self, ctx: &WordContext, x: &Word, r: usize) -> usize {
        let l = &self.layout;
        let slot = ctx.msb(&self.free_slots).expect("a free slot") as usize;
        self.free_slots = ctx.and_not(&self.free_slots, &Word::bit(l.width, slot as u32));
        let value = Word::from_u64(l.width, slot as u64).raw_shl(r as u32 * l.index_field);
        self.index = ctx.or(&self.index, &value);
        self.keys[slot] = x.clone();
        slot
    }

    fn open_column(&self, ctx: &WordContext, m: &Word, h: usize) -> Word {
        let from = &self.layout.cols_from[h];
        let hi = ctx.and(m, from);
        let lo = ctx.and_not(m, from);
        let hi = ctx.shl(&hi, 1);
        ctx.or(&lo, &hi)
    }

    fn close_column(&self, ctx: &WordContext, m: &Word, h: usize) -> Word {
        let l = &self.layout;
        let hi = ctx.and(m, &l.cols_from[h + 1]);
        let hi = ctx.shr(&hi, 1);
        let lo = ctx.and(m, &l.cols_below[h]);
        ctx.or(&lo, &hi)
    }

    /// Copies columns above `h` of row `src` into row `dst`, which must be
    /// zero there.
    fn copy_row_above(&self, ctx: &WordContext, m: &Word, src: usize, dst: usize, h: usize) -> Word {
        let l = &self.layout;
        let part = ctx.shr(m, l.row(src));
        let part = ctx.and(&part, &Word::range_mask(l.width, h as u32 + 1, l.row_width));
        let part = ctx.shl(&part, l.row(dst));
        ctx.or(m, &part)
    }

    /// Deletes `x`; returns false if it was absent.
    pub fn delete(&mut self, ctx: &WordContext, x: &Word) -> bool {
        self.delete_entry(ctx, x).is_some()
    }

    /// Deletes `x` and reports the rank and slot it occupied.
    pub fn delete_entry(&mut self, ctx: &WordContext, x: &Word) -> Option<Entry> {
        if self.n == 0 || x.width() != self.layout.width {
            return None;
        }
        let loc = self.locate(ctx, x);
        if loc.level.is_some() {
            return None;
        }
        let l = Arc::clone(&self.layout);
        let r = loc.rank;
        let slot = wordops::field_get(ctx, &self.index, r, l.index_field)
            .expect("index field in range")
            .low_u64() as usize;
        if self.n > 1 {
            // The leaf's parent is the deepest branch node on its path: the
            // lowest cared-for column of row r.
            let ell = self.comp.ell() as u32;
            let row = ctx.shr(&self.free, l.row(r));
            let row = ctx.and(&row, &Word::low_mask(l.width, ell));
            let cared = ctx.xor(&row, &Word::low_mask(l.width, ell));
            let h = ctx.lsb(&cared).expect("a cared column") as usize;
            let right = ctx.and(&self.branch, &l.cell(r, h)).is_zero();
            // The sibling subtree lies across column h; its far end is the
            // extreme key on that side.
            let flipped = ctx.xor(&loc.xhat, &Word::bit(l.width, h as u32));
            let below = Word::low_mask(l.width, h as u32);
            let (lo, hi) = if right {
                let q = ctx.or(&flipped, &below);
                (r + 1, self.match_compressed(ctx, &q))
            } else {
                let q = ctx.and_not(&flipped, &below);
                (self.match_compressed(ctx, &q), r - 1)
            };
            let cells = l.column_rows(h, lo, hi);
            self.free = ctx.or(&self.free, &cells);
            self.branch = ctx.and_not(&self.branch, &cells);

            self.branch = wordops::close_field(ctx, &self.branch, r, l.row_width);
            self.free = wordops::close_field(ctx, &self.free, r, l.row_width);
            let one = Word::bit(l.width, h as u32 * l.count_field);
            self.counts = ctx.sub(&self.counts, &one);
            let left = wordops::field_get(ctx, &self.counts, h, l.count_field)
                .expect("count field in range");
            if left.is_zero() {
                self.branch = self.close_column(ctx, &self.branch, h);
                self.free = self.close_column(ctx, &self.free, h);
                self.counts = wordops::close_field(ctx, &self.counts, h, l.count_field);
                self.comp
                    .remove_rank(ctx, h)
                    .expect("column has a position");
            }
        } else {
            self.branch = Word::zero(l.width);
            self.free = Word::zero(l.width);
        }
        self.index = wordops::close_field(ctx, &self.index, r, l.index_field);
        self.free_slots = ctx.or(&self.free_slots, &Word::bit(l.width, slot as u32));
        self.keys[slot] = Word::zero(l.width);
        self.n -= 1;
        Some(Entry { rank: r, slot })
    }

    /// Branch-node count per compressed column (not counted).
    pub fn branch_counts(&self) -> Vec<u32> {
        let f = self.layout.count_field;
        (0..self.comp.ell())
            .map(|h| {
                self.counts.extract(h as u32 * f, f) as u32
            })
            .collect()
    }

    /// The don't-care grid: one string per key in rank order, characters for
    /// columns from the highest significant position down.
    pub fn pattern_rows(&self) -> Vec<String> {
        let ell = self.comp.ell();
        (0..self.n)
            .map(|i| {
                (0..ell)
                    .rev()
                    .map(|h| {
                        let bit = self.layout.row(i) + h as u32;
                        if self.free.bit_is_set(bit) {
                            '?'
                        } else if self.branch.bit_is_set(bit) {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Rebuilds the trie description from the keys by brute force over all
    /// pairs and compares it with the node's words.
    pub fn audit(&self) -> Result<()> {
        let l = &self.layout;
        let w = l.width;
        let fail = |msg: String| Err(Error::Audit(msg));
        self.comp.audit()?;
        let keys = self.keys();
        if keys.windows(2).any(|p| p[0] >= p[1]) {
            return fail("keys are not strictly increasing".into());
        }
        let mut slots: Vec<usize> = (0..self.n).map(|i| self.slot_raw(i)).collect();
        slots.sort_unstable();
        slots.dedup();
        let used = (0..l.capacity).filter(|&j| !self.free_slots.bit_is_set(j as u32)).count();
        if slots.len() != self.n || used != self.n || slots.iter().any(|&j| self.free_slots.bit_is_set(j as u32)) {
            return fail("INDEX and free slots disagree".into());
        }
        if self.free_slots.popcount_in(l.capacity as u32, w) != 0
            || self.index.popcount_in(self.n as u32 * l.index_field, w) != 0
        {
            return fail("bits beyond the live slots or ranks".into());
        }
        // levels[i][j] = msb(key_i ^ key_j): the trie level where they part.
        let n = keys.len();
        let mut levels = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = keys[i].raw_xor(&keys[j]).raw_msb().expect("distinct keys");
                levels[i][j] = d;
                levels[j][i] = d;
            }
        }
        let mut all: Vec<u32> = (0..n).flat_map(|i| levels[i][i + 1..].to_vec()).collect();
        all.sort_unstable();
        all.dedup();
        let positions = self.comp.positions();
        if all != positions {
            return fail(format!("significant levels {all:?} but positions {positions:?}"));
        }
        let mut branch = Word::zero(w);
        let mut free = Word::zero(w);
        let mut nodes = vec![Vec::new(); positions.len()];
        for (i, x) in keys.iter().enumerate() {
            for (h, &c) in positions.iter().enumerate() {
                let cared = (0..n).any(|j| j != i && levels[i][j] == c);
                let cell = l.cell(i, h);
                if !cared {
                    free = free.raw_or(&cell);
                } else {
                    if x.bit_is_set(c) {
                        branch = branch.raw_or(&cell);
                    }
                    // Branch nodes at one level are told apart by the bits above it.
                    nodes[h].push(x.raw_shr(c).raw_shr(1));
                }
            }
        }
        if branch != self.branch || free != self.free {
            return fail(format!(
                "BRANCH/FREE differ from the trie of the keys\nexpected:\n{}\nfound:\n{}",
                Grid(&self.keys(), &positions, &branch, &free, l),
                self
            ));
        }
        let expected: Vec<u32> = nodes
            .into_iter()
            .map(|mut prefixes| {
                prefixes.sort_unstable();
                prefixes.dedup();
                prefixes.len() as u32
            })
            .collect();
        if expected != self.branch_counts() {
            return fail(format!(
                "branch counts {:?}, expected {expected:?}",
                self.branch_counts()
            ));
        }
        if self.counts.popcount_in(self.comp.ell() as u32 * l.count_field, w) != 0 {
            return fail("stray branch counts".into());
        }
        Ok(())
    }
}

impl PartialEq for FusionNode {
    /// Equal keys in equal slots with equal matrices; compressor internals
    /// that do not affect results are ignored.
    fn eq(&self, other: &FusionNode) -> bool {
        self.layout.width == other.layout.width
            && self.layout.k == other.layout.k
            && self.layout.capacity == other.layout.capacity
            && self.n == other.n
            && self.keys == other.keys
            && self.free_slots == other.free_slots
            && self.index == other.index
            && self.branch == other.branch
            && self.free == other.free
            && self.comp == other.comp
            && self.counts == other.counts
    }
}

impl Eq for FusionNode {}

struct Grid<'a>(&'a [Word], &'a [u32], &'a Word, &'a Word, &'a NodeLayout);

impl fmt::Display for Grid<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Grid(keys, positions, branch, free, l) = *self;
        let header: Vec<String> = positions.iter().rev().map(u32::to_string).collect();
        let cell = header.iter().map(String::len).max().unwrap_or(1);
        for p in &header {
            write!(f, "{p:>cell$} ")?;
        }
        writeln!(f, "|")?;
        for (i, key) in keys.iter().enumerate().rev() {
            for h in (0..positions.len()).rev() {
                let bit = l.row(i) + h as u32;
                let c = if free.bit_is_set(bit) {
                    '?'
                } else if branch.bit_is_set(bit) {
                    '1'
                } else {
                    '0'
                };
                write!(f, "{c:>cell$} ")?;
            }
            writeln!(f, "| {i} {key}")?;
        }
        Ok(())
    }
}

impl fmt::Display for FusionNode {
    /// Keys from the highest rank down with their don't-care rows, columns
    /// labelled by bit position.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let positions = self.comp.positions();
        Grid(&self.keys(), &positions, &self.branch, &self.free, &self.layout).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FIGURE: [u64; 5] = [0x91, 0x92, 0xD2, 0xDA, 0xFA];

    fn figure_node(order: &[u64]) -> (WordContext, FusionNode) {
        let ctx = WordContext::new(256).unwrap();
        let layout = Arc::new(NodeLayout::with_capacity(256, 4, 5).unwrap());
        let mut node = FusionNode::with_layout(layout);
        for &k in order {
            assert!(node.insert(&ctx, &ctx.word(k)).unwrap());
            node.audit().unwrap();
        }
        (ctx, node)
    }

    #[test]
    fn figure_one_grid() {
        let mut orders = vec![FIGURE.to_vec()];
        orders.push(FIGURE.iter().rev().copied().collect());
        orders.push(vec![0xD2, 0xFA, 0x91, 0xDA, 0x92]);
        for order in orders {
            let (ctx, node) = figure_node(&order);
            assert_eq!(node.compressor().positions(), vec![1, 3, 5, 6]);
            assert_eq!(node.pattern_rows(), vec!["0??0", "0??1", "100?", "101?", "11??"]);
            assert_eq!(node.match_rank(&ctx, &ctx.word(192)).unwrap(), 2);
            assert_eq!(node.rank(&ctx, &ctx.word(192)), 2);
            assert_eq!(node.rank(&ctx, &ctx.word(215)), 3);
            assert_eq!(node.rank(&ctx, &ctx.word(210)), 2);
            assert_eq!(node.select(&ctx, 0).unwrap(), ctx.word(145));
            assert_eq!(node.select(&ctx, 4).unwrap(), ctx.word(250));
            assert!(node.select(&ctx, 5).is_err());
        }
    }

    #[test]
    fn figure_one_delete() {
        let (ctx, mut node) = figure_node(&FIGURE);
        assert!(node.delete(&ctx, &ctx.word(0xFA)));
        node.audit().unwrap();
        assert_eq!(node.compressor().positions(), vec![1, 3, 6]);
        let (_, rebuilt) = figure_node(&FIGURE[..4]);
        assert_eq!(node.pattern_rows(), rebuilt.pattern_rows());
    }

    #[test]
    fn dump_shows_grid() {
        let (_, node) = figure_node(&FIGURE);
        let text = node.to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "6 5 3 1 |");
        assert_eq!(lines[1], "1 1 ? ? | 4 0xfa");
        assert_eq!(lines[5], "0 ? ? 0 | 0 0x91");
    }

    #[test]
    fn small_cases() {
        let ctx = WordContext::new(256).unwrap();
        let mut node = FusionNode::new(256, 4).unwrap();
        assert_eq!(node.rank(&ctx, &ctx.word(9)), 0);
        assert!(node.match_rank(&ctx, &ctx.word(9)).is_err());
        node.insert(&ctx, &ctx.word(9)).unwrap();
        assert_eq!(node.compressor().ell(), 0);
        assert_eq!(node.match_rank(&ctx, &ctx.word(1000)).unwrap(), 0);
        assert_eq!(node.rank(&ctx, &ctx.word(1000)), 1);
        let before = node.clone();
        assert!(!node.insert(&ctx, &ctx.word(9)).unwrap());
        assert_eq!(node, before);
        assert!(!node.delete(&ctx, &ctx.word(10)));
        assert!(node.delete(&ctx, &ctx.word(9)));
        assert!(node.is_empty());
        assert_eq!(node, FusionNode::new(256, 4).unwrap());
    }

    #[test]
    fn capacity_error() {
        let ctx = WordContext::new(256).unwrap();
        let mut node = FusionNode::new(256, 4).unwrap();
        for k in 0..4 {
            node.insert(&ctx, &ctx.word(k * 7)).unwrap();
        }
        assert_eq!(
            node.insert(&ctx, &ctx.word(100)),
            Err(Error::Capacity { capacity: 4 })
        );
        assert!(!node.insert(&ctx, &ctx.word(7)).unwrap());
    }

    fn random_key(rng: &mut ChaCha8Rng, w: u32, pattern: usize) -> Word {
        match pattern {
            0 => Word::from_u64(w, rng.gen_range(0..64)),
            1 => {
                let limbs: Vec<u64> = (0..w / 64).map(|_| rng.gen()).collect();
                Word::from_limbs(w, &limbs)
            }
            _ => {
                // Shared high prefix, differences low and high.
                let mut x = Word::bit(w, w - 1).raw_or(&Word::bit(w, w / 2));
                for _ in 0..3 {
                    let b = if rng.gen_bool(0.5) { rng.gen_range(0..8) } else { rng.gen_range(0..w) };
                    x = x.raw_xor(&Word::bit(w, b));
                }
                x
            }
        }
    }

    #[test]
    fn random_against_sorted_vec() {
        for (w, k) in [(256, 4), (4096, 8), (65536, 16)] {
            let ctx = WordContext::new(w).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            for pattern in 0..3 {
                let mut node = FusionNode::new(w, k).unwrap();
                let mut model: Vec<Word> = Vec::new();
                for _ in 0..1500 {
                    let x = random_key(&mut rng, w, pattern);
                    let pos = model.binary_search(&x);
                    match rng.gen_range(0..4) {
                        0 | 1 if model.len() < k => {
                            let inserted = node.insert(&ctx, &x).unwrap();
                            assert_eq!(inserted, pos.is_err());
                            if let Err(p) = pos {
                                model.insert(p, x.clone());
                            }
                            node.audit().unwrap();
                        }
                        2 => {
                            let y = if model.is_empty() || rng.gen_bool(0.2) {
                                x.clone()
                            } else {
                                model[rng.gen_range(0..model.len())].clone()
                            };
                            let p = model.binary_search(&y);
                            assert_eq!(node.delete(&ctx, &y), p.is_ok());
                            if let Ok(p) = p {
                                model.remove(p);
                            }
                            node.audit().unwrap();
                        }
                        _ => {
                            let expect = model.partition_point(|y| y < &x);
                            assert_eq!(node.rank(&ctx, &x), expect);
                            for (i, y) in model.iter().enumerate() {
                                assert_eq!(&node.select(&ctx, i).unwrap(), y);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn insert_delete_restores_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = WordContext::new(4096).unwrap();
        for _ in 0..200 {
            let mut keys: Vec<Word> = Vec::new();
            for _ in 0..rng.gen_range(0..8) {
                let pattern = rng.gen_range(0..3);
                keys.push(random_key(&mut rng, 4096, pattern));
            }
            keys.shuffle(&mut rng);
            let mut node = FusionNode::new(4096, 8).unwrap();
            for x in &keys {
                node.insert(&ctx, x).unwrap();
            }
            let pattern = rng.gen_range(0..3);
            let x = random_key(&mut rng, 4096, pattern);
            if keys.contains(&x) {
                continue;
            }
            let before = node.clone();
            node.insert(&ctx, &x).unwrap();
            node.delete(&ctx, &x);
            assert_eq!(node, before);
        }
    }

    #[test]
    fn op_budgets_hold() {
        let ctx = WordContext::new(65536).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut node = FusionNode::new(65536, 16).unwrap();
        let mut worst = [0u64; 4];
        for _ in 0..3000 {
            let pattern = rng.gen_range(0..3);
            let x = random_key(&mut rng, 65536, pattern);
            ctx.reset_ops();
            node.rank(&ctx, &x);
            worst[0] = worst[0].max(ctx.ops());
            if !node.is_empty() {
                ctx.reset_ops();
                node.select(&ctx, rng.gen_range(0..node.len())).unwrap();
                worst[1] = worst[1].max(ctx.ops());
            }
            ctx.reset_ops();
            if node.is_full() || (node.len() > 8 && rng.gen_bool(0.5)) {
                let y = node.select(&ctx, rng.gen_range(0..node.len())).unwrap();
                ctx.reset_ops();
                node.delete(&ctx, &y);
                worst[3] = worst[3].max(ctx.ops());
            } else {
                node.insert(&ctx, &x).unwrap();
                worst[2] = worst[2].max(ctx.ops());
            }
        }
        eprintln!("worst ops rank/select/insert/delete: {worst:?}");
        assert!(worst[0] <= 40 && worst[1] <= 40, "{worst:?}");
        assert!(worst[2] <= 300 && worst[3] <= 300, "{worst:?}");
    }
}
