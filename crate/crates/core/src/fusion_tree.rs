//! An unbounded dynamic set: a balanced multiway tree of fusion nodes.
//!
//! Every internal node keeps its children's router keys in a
//! [`FusionNode`], so choosing the child to descend into costs a constant
//! number of word operations. Each node also keeps the number of keys below
//! its first `i` children, split as `N[i] = M[i] + D[i]`: `M` is an array of
//! whole-word counters and `D` packs small signed corrections into one word,
//! so an update adds one to a whole range of `D` with a single addition. One
//! field of `D` is folded back into `M` per update, round robin, which keeps
//! every correction within `[-k, k]`. The table `Q` maps a rank to a nearby
//! child so select does not need to search all of `N`.
//!
//! Heights count from the keys: a height-1 node stores keys directly.

use std::cell::Cell;
use std::sync::Arc;

use crate::compressor::{check_geometry, default_k};
use crate::error::{Error, Result};
use crate::fusion_node::{FusionNode, NodeLayout};
use crate::word::{Word, WordContext};
use crate::wordops;
use crate::OrderedSet;

/// How node sizes are kept in check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Balance {
    /// Weight balance: a non-root node of height `h` holds between
    /// `cap(h)/4` and `cap(h) = k (k/4)^(h-1)` keys. Used for `k >= 8`.
    Weight,
    /// Degree balance: every non-root node has 2 to `k` children or keys.
    /// Used for `k = 4`, where `k/4 = 1` leaves no room for weights.
    Degree,
}

/// Shared configuration of one tree.
#[derive(Debug)]
struct Config {
    k: usize,
    balance: Balance,
    layout: Arc<NodeLayout>,
    d_field: u32,
    /// `d_tail[i]`: one in every `D` field from `i` to `k - 1`.
    d_tail: Vec<Word>,
    /// `k` in every `D` field: all corrections zero.
    d_zero: Word,
}

impl Config {
    fn cap(&self, h: u32) -> u64 {
        let k = self.k as u64;
        match self.balance {
            Balance::Weight => k.saturating_mul((k / 4).saturating_pow(h - 1)),
            Balance::Degree => k.saturating_pow(h),
        }
    }

    /// Rank granularity of `Q` at height `h`.
    fn tau(&self, h: u32) -> u64 {
        (self.cap(h) / self.k as u64).max(1)
    }

    fn overfull(&self, node: &Node) -> bool {
        node.degree() > self.k
            || (self.balance == Balance::Weight && node.weight > self.cap(node.height))
    }

    fn underfull(&self, node: &Node) -> bool {
        match self.balance {
            Balance::Weight => node.weight < self.cap(node.height) / 4,
            Balance::Degree => node.degree() < 2,
        }
    }

    /// Where to cut a run of parts into two nodes.
    fn split_point(&self, parts: &[Part]) -> usize {
        match self.balance {
            Balance::Degree => parts.len() / 2,
            Balance::Weight => {
                let total: u64 = parts.iter().map(|p| p.weight).sum();
                let mut best = (u64::MAX, 1);
                let mut prefix = 0;
                for (i, p) in parts[..parts.len() - 1].iter().enumerate() {
                    prefix += p.weight;
                    let gap = (2 * prefix).abs_diff(total);
                    if gap < best.0 {
                        best = (gap, i + 1);
                    }
                }
                best.1
            }
        }
    }

    /// Whether a merged run of parts fits in one node.
    fn fits(&self, parts: &[Part], height: u32) -> bool {
        let weight: u64 = parts.iter().map(|p| p.weight).sum();
        parts.len() <= self.k
            && (self.balance == Balance::Degree || weight <= self.cap(height))
    }
}

/// A child (or key, at height 1) with its router.
struct Part {
    router: Word,
    child: Option<Box<Node>>,
    weight: u64,
}

#[derive(Debug, Clone)]
struct Node {
    height: u32,
    routers: FusionNode,
    /// Co-indexed with the router slots; empty at height 1.
    children: Vec<Option<Box<Node>>>,
    /// By child rank.
    m: Vec<i64>,
    d: Word,
    /// `q[j]`: number of children `i >= 1` with `M[i] <= j * tau`.
    q: Vec<u64>,
    rr: usize,
    weight: u64,
}

enum Grow {
    Unchanged,
    Grew,
    /// The node kept the lower part and hands up a new right sibling.
    Split(Word, Box<Node>),
}

impl Node {
    fn degree(&self) -> usize {
        self.routers.len()
    }

    fn build(cfg: &Config, ctx: &WordContext, height: u32, parts: Vec<Part>) -> Box<Node> {
        let w = cfg.layout.width();
        let mut node = Box::new(Node {
            height,
            routers: FusionNode::with_layout(Arc::clone(&cfg.layout)),
            children: Vec::new(),
            m: vec![0; cfg.k],
            d: Word::zero(w),
            q: vec![0; cfg.k + 1],
            rr: 0,
            weight: 0,
        });
        node.fill(cfg, ctx, parts);
        node
    }

    fn fill(&mut self, cfg: &Config, ctx: &WordContext, parts: Vec<Part>) {
        self.routers = FusionNode::with_layout(Arc::clone(&cfg.layout));
        self.children = if self.height > 1 {
            (0..cfg.layout.capacity()).map(|_| None).collect()
        } else {
            Vec::new()
        };
        self.weight = 0;
        for part in parts {
            let entry = self
                .routers
                .insert_entry(ctx, &part.router)
                .expect("room for every part")
                .expect("distinct routers");
            if let Some(child) = part.child {
                self.children[entry.slot] = Some(child);
            }
            self.weight += part.weight;
        }
        self.reset_counters(cfg, ctx);
    }

    /// Parts in rank order, leaving the node empty.
    fn take_parts(&mut self) -> Vec<Part> {
        (0..self.degree())
            .map(|i| {
                let slot = self.routers.slot_raw(i);
                let router = self.routers.key_in_slot(slot).clone();
                let child = self.children.get_mut(slot).and_then(Option::take);
                let weight = child.as_ref().map_or(1, |c| c.weight);
                Part {
                    router,
                    child,
                    weight,
                }
            })
            .collect()
    }

    fn child_weight(&self, i: usize) -> u64 {
        match self.height {
            1 => 1,
            _ => self.children[self.routers.slot_raw(i)]
                .as_ref()
                .expect("child")
                .weight,
        }
    }

    /// Exact `N`, zero corrections and a fresh `Q`.
    fn reset_counters(&mut self, cfg: &Config, ctx: &WordContext) {
        if self.height == 1 {
            return;
        }
        let deg = self.degree();
        let mut prefix = 0;
        for i in 0..cfg.k {
            self.m[i] = prefix as i64;
            if i < deg {
                prefix += self.child_weight(i);
            }
        }
        self.d = cfg.d_zero.clone();
        self.rr = 0;
        let tau = cfg.tau(self.height) as i64;
        for (j, q) in self.q.iter_mut().enumerate() {
            *q = (1..deg).filter(|&i| self.m[i] <= j as i64 * tau).count() as u64;
        }
        ctx.charge((deg + cfg.k + 2) as u64);
    }

    /// `N[i]`: keys below children `0..i`.
    fn n(&self, cfg: &Config, ctx: &WordContext, i: usize) -> u64 {
        if i == 0 {
            return 0;
        }
        let d = wordops::field_get(ctx, &self.d, i, cfg.d_field)
            .expect("D field")
            .low_u64() as i64;
        ctx.charge(1);
        (self.m[i] + d - cfg.k as i64) as u64
    }

    /// Child rank and slot to descend into for `x`.
    fn route(&self, ctx: &WordContext, x: &Word) -> (usize, usize) {
        let r = self.routers.rank(ctx, x);
        if r < self.degree() {
            let slot = self.routers.slot(ctx, r).expect("rank in range");
            if ctx.cmp(self.routers.key_in_slot(slot), x).is_eq() {
                return (r, slot);
            }
        }
        let i = r.saturating_sub(1);
        (i, self.routers.slot(ctx, i).expect("rank in range"))
    }

    /// Child `i` gained (`up`) or lost one key.
    fn count(&mut self, cfg: &Config, ctx: &WordContext, i: usize, up: bool) {
        let tail = &cfg.d_tail[i + 1];
        self.d = if up {
            ctx.add(&self.d, tail)
        } else {
            ctx.sub(&self.d, tail)
        };
        let rr = self.rr;
        self.rr = (rr + 1) % cfg.k;
        let field = wordops::field_get(ctx, &self.d, rr, cfg.d_field).expect("D field");
        let delta = field.low_u64() as i64 - cfg.k as i64;
        let lo = rr as u32 * cfg.d_field;
        let mask = Word::range_mask(self.d.width(), lo, lo + cfg.d_field);
        self.d = ctx.and_not(&self.d, &mask);
        self.d = ctx.or(&self.d, &cfg.d_zero.raw_and(&mask));
        ctx.charge(1);
        let old = self.m[rr];
        let new = old + delta;
        self.m[rr] = new;
        if rr == 0 || rr >= self.degree() || delta == 0 {
            return;
        }
        // Thresholds between the old and new value change count by one.
        let tau = cfg.tau(self.height) as i64;
        let (lo, hi) = (old.min(new), old.max(new));
        let first = ((lo + tau - 1) / tau).max(0) as usize;
        for j in first..self.q.len() {
            let t = j as i64 * tau;
            if t >= hi {
                break;
            }
            ctx.charge(1);
            if new > old {
                self.q[j] -= 1;
            } else {
                self.q[j] += 1;
            }
        }
    }

    fn insert(&mut self, cfg: &Config, ctx: &WordContext, x: &Word) -> Grow {
        if self.height == 1 {
            return match self.routers.insert_entry(ctx, x) {
                Ok(None) => Grow::Unchanged,
                Ok(Some(_)) => {
                    self.weight += 1;
                    if cfg.overfull(self) {
                        self.split(cfg, ctx, None)
                    } else {
                        Grow::Grew
                    }
                }
                Err(Error::Capacity { .. }) => {
                    let extra = Part {
                        router: x.clone(),
                        child: None,
                        weight: 1,
                    };
                    self.split(cfg, ctx, Some(extra))
                }
                Err(e) => panic!("unexpected fusion node error: {e}"),
            };
        }
        let (i, mut slot) = self.route(ctx, x);
        if i == 0 && ctx.cmp(x, self.routers.key_in_slot(slot)).is_lt() {
            // Keep the first router at the subtree minimum.
            let old = self.routers.key_in_slot(slot).clone();
            let child = self.children[slot].take();
            self.routers.delete(ctx, &old);
            slot = self
                .routers
                .insert_entry(ctx, x)
                .expect("room after a delete")
                .expect("new router")
                .slot;
            self.children[slot] = child;
        }
        let child = self.children[slot].as_mut().expect("child");
        match child.insert(cfg, ctx, x) {
            Grow::Unchanged => Grow::Unchanged,
            Grow::Grew => {
                self.weight += 1;
                if cfg.overfull(self) {
                    return self.split(cfg, ctx, None);
                }
                self.count(cfg, ctx, i, true);
                Grow::Grew
            }
            Grow::Split(router, right) => {
                self.weight += 1;
                let part = Part {
                    router: router.clone(),
                    weight: right.weight,
                    child: Some(right),
                };
                if self.routers.is_full() {
                    return self.split(cfg, ctx, Some(part));
                }
                let entry = self
                    .routers
                    .insert_entry(ctx, &router)
                    .expect("room for a router")
                    .expect("new router");
                self.children[entry.slot] = part.child;
                if cfg.overfull(self) {
                    return self.split(cfg, ctx, None);
                }
                self.reset_counters(cfg, ctx);
                Grow::Grew
            }
        }
    }

    /// Rebuilds this node from its parts (plus `extra`) as two nodes.
    fn split(&mut self, cfg: &Config, ctx: &WordContext, extra: Option<Part>) -> Grow {
        let mut parts = self.take_parts();
        if let Some(extra) = extra {
            let at = parts.partition_point(|p| p.router < extra.router);
            parts.insert(at, extra);
        }
        let cut = cfg.split_point(&parts);
        let right = parts.split_off(cut);
        let router = right[0].router.clone();
        let right = Node::build(cfg, ctx, self.height, right);
        self.fill(cfg, ctx, parts);
        Grow::Split(router, right)
    }

    fn delete(&mut self, cfg: &Config, ctx: &WordContext, x: &Word) -> bool {
        if self.height == 1 {
            let gone = self.routers.delete(ctx, x);
            if gone {
                self.weight -= 1;
            }
            return gone;
        }
        let (i, slot) = self.route(ctx, x);
        let child = self.children[slot].as_mut().expect("child");
        if !child.delete(cfg, ctx, x) {
            return false;
        }
        self.weight -= 1;
        self.count(cfg, ctx, i, false);
        if cfg.underfull(self.children[slot].as_ref().expect("child")) {
            self.fix_child(cfg, ctx, i);
        }
        true
    }

    /// Merges the underfull child `i` with a neighbour, or shares the
    /// neighbour's parts when the two do not fit in one node.
    fn fix_child(&mut self, cfg: &Config, ctx: &WordContext, i: usize) {
        if self.degree() < 2 {
            return;
        }
        let lo = if i > 0 { i - 1 } else { i };
        let lo_slot = self.routers.slot_raw(lo);
        let hi_slot = self.routers.slot_raw(lo + 1);
        let separator = self.routers.key_in_slot(hi_slot).clone();
        let mut left = self.children[lo_slot].take().expect("child");
        let mut right = self.children[hi_slot].take().expect("child");
        let mut parts = left.take_parts();
        let mut tail = right.take_parts();
        if left.height > 1 {
            // The right node's first router may be below the separator.
            tail[0].router = separator.clone();
        }
        parts.append(&mut tail);
        self.routers.delete(ctx, &separator);
        if cfg.fits(&parts, left.height) {
            left.fill(cfg, ctx, parts);
            left.settle(cfg, ctx);
            self.children[lo_slot] = Some(left);
        } else {
            let cut = cfg.split_point(&parts);
            let upper = parts.split_off(cut);
            let router = upper[0].router.clone();
            left.fill(cfg, ctx, parts);
            right.fill(cfg, ctx, upper);
            left.settle(cfg, ctx);
            right.settle(cfg, ctx);
            self.children[lo_slot] = Some(left);
            let entry = self
                .routers
                .insert_entry(ctx, &router)
                .expect("room for a router")
                .expect("new router");
            self.children[entry.slot] = Some(right);
        }
        self.reset_counters(cfg, ctx);
    }

    /// Fixes underfull children left behind by a merge one level up.
    fn settle(&mut self, cfg: &Config, ctx: &WordContext) {
        if self.height == 1 {
            return;
        }
        while self.degree() >= 2 {
            let weak = (0..self.degree()).find(|&i| {
                let slot = self.routers.slot_raw(i);
                cfg.underfull(self.children[slot].as_ref().expect("child"))
            });
            match weak {
                Some(i) => self.fix_child(cfg, ctx, i),
                None => break,
            }
        }
    }

    fn rank(&self, cfg: &Config, ctx: &WordContext, x: &Word) -> u64 {
        let mut node = self;
        let mut acc = 0;
        while node.height > 1 {
            let (i, slot) = node.route(ctx, x);
            acc += node.n(cfg, ctx, i);
            node = node.children[slot].as_ref().expect("child");
        }
        acc + node.routers.rank(ctx, x) as u64
    }

    fn select(&self, cfg: &Config, ctx: &WordContext, mut r: u64, scan: &Cell<usize>) -> Word {
        let mut node = self;
        while node.height > 1 {
            let deg = node.degree();
            ctx.charge(1);
            let j = ((r / cfg.tau(node.height)) as usize).min(cfg.k);
            let mut i = (node.q[j] as usize).min(deg - 1);
            let mut steps = 1;
            let mut n = node.n(cfg, ctx, i);
            if n <= r {
                while i + 1 < deg {
                    let next = node.n(cfg, ctx, i + 1);
                    steps += 1;
                    if next > r {
                        break;
                    }
                    i += 1;
                    n = next;
                }
            } else {
                while n > r {
                    i -= 1;
                    n = node.n(cfg, ctx, i);
                    steps += 1;
                }
            }
            scan.set(scan.get().max(steps));
            r -= n;
            let slot = node.routers.slot(ctx, i).expect("rank in range");
            node = node.children[slot].as_ref().expect("child");
        }
        node.routers.select(ctx, r as usize).expect("rank in range")
    }

    fn first_key(&self) -> &Word {
        let slot = self.routers.slot_raw(0);
        match self.height {
            1 => self.routers.key_in_slot(slot),
            _ => self.children[slot].as_ref().expect("child").first_key(),
        }
    }

    fn collect(&self, out: &mut Vec<Word>) {
        if self.height == 1 {
            out.extend(self.routers.keys());
            return;
        }
        for i in 0..self.degree() {
            self.children[self.routers.slot_raw(i)]
                .as_ref()
                .expect("child")
                .collect(out);
        }
    }

    /// Checks this subtree; returns its smallest and largest key.
    fn audit(&self, cfg: &Config, is_root: bool, deep: bool, stats: &mut TreeStats) -> Result<(Word, Word)> {
        let fail = |msg: String| Err(Error::Audit(format!("height {}: {msg}", self.height)));
        stats.nodes += 1;
        if deep {
            self.routers.audit()?;
        }
        let deg = self.degree();
        if deg == 0 {
            return fail("empty node".into());
        }
        let cap = cfg.cap(self.height);
        match cfg.balance {
            Balance::Weight => {
                if self.weight > cap || (!is_root && self.weight < cap / 4) {
                    return fail(format!("weight {} outside [{}, {cap}]", self.weight, cap / 4));
                }
            }
            Balance::Degree => {
                if !is_root && deg < 2 {
                    return fail(format!("degree {deg} below 2"));
                }
            }
        }
        if is_root && self.height > 1 && deg < 2 {
            return fail("root with a single child".into());
        }
        let routers = self.routers.keys();
        if self.height == 1 {
            if self.weight != deg as u64 {
                return fail(format!("weight {} but {deg} keys", self.weight));
            }
            return Ok((routers[0].clone(), routers[deg - 1].clone()));
        }
        let mut prefix = 0u64;
        let mut lowest = None;
        let mut prev_max: Option<Word> = None;
        for (i, router) in routers.iter().enumerate() {
            let child = self.children[self.routers.slot_raw(i)]
                .as_ref()
                .ok_or_else(|| Error::Audit("missing child".into()))?;
            if child.height + 1 != self.height {
                return fail(format!("child {i} has height {}", child.height));
            }
            let exact = prefix as i64;
            let d = self.d.extract(i as u32 * cfg.d_field, cfg.d_field) as i64;
            if d > 2 * cfg.k as i64 {
                return fail(format!("D field {i} is {d}, outside [0, 2k]"));
            }
            if i > 0 && self.m[i] + d - cfg.k as i64 != exact {
                return fail(format!("N[{i}] = {} but {exact} keys precede", self.m[i] + d - cfg.k as i64));
            }
            let (min, max) = child.audit(cfg, false, deep, stats)?;
            if prev_max.as_ref().is_some_and(|p| p >= router) || router > &min {
                return fail(format!("router {router} does not separate child {i}"));
            }
            lowest.get_or_insert(min);
            prev_max = Some(max);
            prefix += child.weight;
        }
        for i in deg..cfg.k {
            let d = self.d.extract(i as u32 * cfg.d_field, cfg.d_field);
            if d > 2 * cfg.k as u64 {
                return fail(format!("unused D field {i} is {d}"));
            }
        }
        if prefix != self.weight {
            return fail(format!("weight {} but {prefix} keys below", self.weight));
        }
        let tau = cfg.tau(self.height) as i64;
        for (j, &q) in self.q.iter().enumerate() {
            let expect = (1..deg).filter(|&i| self.m[i] <= j as i64 * tau).count() as u64;
            if q != expect {
                return fail(format!("Q[{j}] = {q}, expected {expect}"));
            }
        }
        Ok((lowest.expect("children"), prev_max.expect("children")))
    }
}

/// Shape numbers gathered by an audit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub nodes: usize,
    pub height: u32,
}

/// A dynamic ordered set of `W`-bit keys.
#[derive(Debug)]
pub struct FusionTree {
    ctx: WordContext,
    cfg: Config,
    root: Option<Box<Node>>,
    len: u64,
    max_scan: Cell<usize>,
}

impl FusionTree {
    /// A tree over `width`-bit keys with fusion nodes of capacity `k`.
    pub fn new(width: u32, k: usize) -> Result<FusionTree> {
        let ctx = WordContext::new(width)?;
        check_geometry(width, k)?;
        let layout = Arc::new(NodeLayout::new(width, k)?);
        let d_field = k.trailing_zeros() + 2;
        let d_tail = (0..=k)
            .map(|i| {
                Word::from_bit_positions(width, (i as u32..k as u32).map(|f| f * d_field))
            })
            .collect();
        let d_zero = wordops::unit_pattern(width, d_field, k).raw_mul(&Word::from_u64(width, k as u64));
        let balance = if k >= 8 { Balance::Weight } else { Balance::Degree };
        Ok(FusionTree {
            ctx,
            cfg: Config {
                k,
                balance,
                layout,
                d_field,
                d_tail,
                d_zero,
            },
            root: None,
            len: 0,
            max_scan: Cell::new(0),
        })
    }

    /// A tree with the largest `k` allowed for `width`.
    pub fn with_width(width: u32) -> Result<FusionTree> {
        FusionTree::new(width, default_k(width))
    }

    /// The operation counter all word operations are charged to.
    pub fn ctx(&self) -> &WordContext {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.cfg.k
    }

    pub fn balance(&self) -> Balance {
        self.cfg.balance
    }

    /// Most keys a node of height `h` may hold.
    pub fn capacity_at(&self, h: u32) -> u64 {
        self.cfg.cap(h)
    }

    /// Height of the root, 0 for an empty tree.
    pub fn height(&self) -> u32 {
        self.root.as_ref().map_or(0, |r| r.height)
    }

    /// The word with value `v`, at this tree's width.
    pub fn word(&self, v: u64) -> Word {
        self.ctx.word(v)
    }

    /// Longest outward scan any select has needed since the last reset.
    pub fn max_select_scan(&self) -> usize {
        self.max_scan.get()
    }

    pub fn reset_select_scan(&self) {
        self.max_scan.set(0);
    }

    fn check(&self, x: &Word) -> Result<()> {
        if x.width() != self.ctx.width() {
            return Err(Error::WidthMismatch {
                left: x.width(),
                right: self.ctx.width(),
            });
        }
        Ok(())
    }

    /// All keys in ascending order (not counted).
    pub fn keys(&self) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.len as usize);
        if let Some(root) = &self.root {
            root.collect(&mut out);
        }
        out
    }

    /// Checks balance, routers, counters and the `Q` tables. With `deep`,
    /// also rebuilds every fusion node's matrices from its keys.
    pub fn audit(&self, deep: bool) -> Result<TreeStats> {
        let mut stats = TreeStats::default();
        let Some(root) = &self.root else {
            if self.len != 0 {
                return Err(Error::Audit(format!("empty tree with len {}", self.len)));
            }
            return Ok(stats);
        };
        stats.height = root.height;
        root.audit(&self.cfg, true, deep, &mut stats)?;
        if root.weight != self.len {
            return Err(Error::Audit(format!(
                "root weight {} but len {}",
                root.weight, self.len
            )));
        }
        Ok(stats)
    }

    fn collapse_root(&mut self) {
        while let Some(root) = self.root.as_mut() {
            if root.height == 1 {
                if root.degree() == 0 {
                    self.root = None;
                }
                return;
            }
            if root.degree() > 1 {
                return;
            }
            let slot = root.routers.slot_raw(0);
            let mut child = root.children[slot].take().expect("child");
            child.settle(&self.cfg, &self.ctx);
            self.root = Some(child);
        }
    }
}

impl OrderedSet for FusionTree {
    fn width(&self) -> u32 {
        self.ctx.width()
    }

    fn len(&self) -> u64 {
        self.len
    }

    fn insert(&mut self, x: &Word) -> Result<bool> {
        self.check(x)?;
        let (cfg, ctx) = (&self.cfg, &self.ctx);
        let Some(root) = self.root.as_mut() else {
            let part = Part {
                router: x.clone(),
                child: None,
                weight: 1,
            };
            self.root = Some(Node::build(cfg, ctx, 1, vec![part]));
            self.len = 1;
            return Ok(true);
        };
        match root.insert(cfg, ctx, x) {
            Grow::Unchanged => return Ok(false),
            Grow::Grew => {}
            Grow::Split(router, right) => {
                let left = self.root.take().expect("root");
                let height = left.height + 1;
                let parts = vec![
                    Part {
                        router: left.first_key().clone(),
                        weight: left.weight,
                        child: Some(left),
                    },
                    Part {
                        router,
                        weight: right.weight,
                        child: Some(right),
                    },
                ];
                self.root = Some(Node::build(cfg, ctx, height, parts));
            }
        }
        self.len += 1;
        Ok(true)
    }

    fn delete(&mut self, x: &Word) -> Result<bool> {
        self.check(x)?;
        let Some(root) = self.root.as_mut() else {
            return Ok(false);
        };
        if !root.delete(&self.cfg, &self.ctx, x) {
            return Ok(false);
        }
        self.len -= 1;
        self.collapse_root();
        Ok(true)
    }

    fn member(&self, x: &Word) -> Result<bool> {
        let r = self.rank(x)?;
        Ok(r < self.len && self.ctx.cmp(&self.select(r)?, x).is_eq())
    }

    fn rank(&self, x: &Word) -> Result<u64> {
        self.check(x)?;
        Ok(self
            .root
            .as_ref()
            .map_or(0, |root| root.rank(&self.cfg, &self.ctx, x)))
    }

    fn select(&self, r: u64) -> Result<Word> {
        match &self.root {
            Some(root) if r < self.len => Ok(root.select(&self.cfg, &self.ctx, r, &self.max_scan)),
            _ => Err(Error::NoSuchRank { rank: r, len: self.len }),
        }
    }

    fn predecessor(&self, x: &Word) -> Result<Option<Word>> {
        let r = self.rank(x)?;
        if r == 0 {
            return Ok(None);
        }
        self.select(r - 1).map(Some)
    }

    fn successor(&self, x: &Word) -> Result<Option<Word>> {
        let r = self.rank(x)?;
        if r == self.len {
            return Ok(None);
        }
        self.select(r).map(Some)
    }
}
