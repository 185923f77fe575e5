//! Differential fuzzing and benchmarking of [`FusionTree`] against
//! [`OracleSet`].
//!
//! Both drivers are deterministic for a given seed: the key stream and the
//! op stream come from a ChaCha generator, and reports leave wall-clock
//! figures out of their `Display` output.

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::trace::{Op, OpKind, OpTrace, Outcome};
use crate::word::Word;
use crate::{FusionTree, OracleSet, OrderedSet};

/// A set the harness can drive: word-op accounting and a self-check on top
/// of the set interface.
pub trait Subject: OrderedSet {
    /// Word operations charged so far; zero if not instrumented.
    fn word_ops(&self) -> u64 {
        0
    }

    /// Tree height, or zero for flat structures.
    fn height(&self) -> u32 {
        0
    }

    /// Verifies internal invariants.
    fn check(&self) -> Result<()> {
        Ok(())
    }

    /// Adds many keys at once.
    fn grow(&mut self, keys: Vec<Word>) -> Result<()> {
        for x in &keys {
            self.insert(x)?;
        }
        Ok(())
    }
}

impl Subject for FusionTree {
    fn word_ops(&self) -> u64 {
        self.ctx().ops()
    }

    fn height(&self) -> u32 {
        FusionTree::height(self)
    }

    fn check(&self) -> Result<()> {
        self.audit(true).map(|_| ())
    }
}

impl Subject for OracleSet {
    fn grow(&mut self, keys: Vec<Word>) -> Result<()> {
        self.extend_keys(keys)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Uniform keys of `keybits` bits.
    Random,
    /// Increasing keys with small random gaps.
    Ascending,
    /// Keys near a few random centres, so many share long prefixes.
    Clustered,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::Random, Pattern::Ascending, Pattern::Clustered];
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pattern> {
        match s {
            "random" => Ok(Pattern::Random),
            "ascending" => Ok(Pattern::Ascending),
            "clustered" => Ok(Pattern::Clustered),
            _ => Err(Error::Usage(format!("unknown pattern {s:?}"))),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Random => "random",
            Pattern::Ascending => "ascending",
            Pattern::Clustered => "clustered",
        })
    }
}

/// Which implementation(s) a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Impl {
    Fusion,
    Oracle,
    Both,
}

impl FromStr for Impl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Impl> {
        match s {
            "fusion" => Ok(Impl::Fusion),
            "oracle" => Ok(Impl::Oracle),
            "both" => Ok(Impl::Both),
            _ => Err(Error::Usage(format!("unknown implementation {s:?}"))),
        }
    }
}

const CLUSTERS: usize = 8;
const CLUSTER_BITS: u32 = 12;

/// Seeded key stream for one [`Pattern`].
#[derive(Debug, Clone)]
pub struct KeyGen {
    pattern: Pattern,
    width: u32,
    keybits: u32,
    counter: u64,
    centres: Vec<Word>,
}

impl KeyGen {
    /// Keys below `2^keybits`; `keybits` must be in `1..=width`.
    pub fn new(pattern: Pattern, width: u32, keybits: u32, rng: &mut impl Rng) -> Result<KeyGen> {
        if keybits == 0 || keybits > width {
            return Err(Error::Usage(format!(
                "keybits {keybits} must be in 1..={width}"
            )));
        }
        let centres = (0..CLUSTERS).map(|_| random_word(rng, width, keybits)).collect();
        Ok(KeyGen {
            pattern,
            width,
            keybits,
            counter: 0,
            centres,
        })
    }

    pub fn next_key(&mut self, rng: &mut impl Rng) -> Word {
        let (w, kb) = (self.width, self.keybits);
        match self.pattern {
            Pattern::Random => random_word(rng, w, kb),
            Pattern::Ascending => {
                self.counter = self.counter.wrapping_add(rng.gen_range(1..=16));
                if kb <= 64 {
                    Word::from_u64(w, self.counter & low_bits(kb))
                } else {
                    // The counter sits above random low bits.
                    let low = random_word(rng, w, kb - 64);
                    let high = Word::from_u64(w, self.counter).raw_shl(kb - 64);
                    high.raw_or(&low)
                }
            }
            Pattern::Clustered => {
                let c = &self.centres[rng.gen_range(0..CLUSTERS)];
                c.raw_xor(&random_word(rng, w, CLUSTER_BITS.min(kb)))
            }
        }
    }
}

fn low_bits(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

fn random_word(rng: &mut impl Rng, width: u32, bits: u32) -> Word {
    let limbs: Vec<u64> = (0..bits.div_ceil(64))
        .map(|i| rng.gen::<u64>() & low_bits(bits - 64 * i))
        .collect();
    Word::from_limbs(width, &limbs)
}

/// Settings of one fuzz run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub ops: u64,
    pub width: u32,
    pub k: usize,
    pub keybits: u32,
    pub pattern: Pattern,
    /// Run the subject's self-check after every this many ops; 0 disables.
    pub audit_every: u64,
}

impl FuzzConfig {
    pub fn new(width: u32, k: usize) -> FuzzConfig {
        FuzzConfig {
            seed: 1,
            ops: 10_000,
            width,
            k,
            keybits: width.min(64),
            pattern: Pattern::Random,
            audit_every: 1000,
        }
    }
}

/// Word-op statistics of one op class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpStats {
    pub count: u64,
    pub total: u64,
    pub max: u64,
}

impl OpStats {
    fn record(&mut self, ops: u64) {
        self.count += 1;
        self.total += ops;
        self.max = self.max.max(ops);
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.total as f64 / self.count as f64
        }
    }
}

/// A failing fuzz run, reduced to a small reproducer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    /// Index of the first failing op in the generated stream.
    pub at: u64,
    pub message: String,
    /// A 1-minimal trace that still fails.
    pub trace: OpTrace,
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub executed: u64,
    pub audits: u64,
    pub stats: BTreeMap<OpKind, OpStats>,
    pub failure: Option<Failure>,
    pub elapsed: Duration,
}

impl FuzzReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }

    pub fn ops_per_sec(&self) -> f64 {
        self.executed as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "fuzz seed={} ops={} width={} k={} keybits={} pattern={}",
            c.seed, c.ops, c.width, c.k, c.keybits, c.pattern
        )?;
        writeln!(f, "{:<6}{:>10}{:>10}{:>12}", "op", "count", "max_ops", "mean_ops")?;
        for (kind, s) in &self.stats {
            writeln!(
                f,
                "{:<6}{:>10}{:>10}{:>12.1}",
                kind.mnemonic(),
                s.count,
                s.max,
                s.mean()
            )?;
        }
        writeln!(f, "executed {} ops, {} audits", self.executed, self.audits)?;
        match &self.failure {
            None => write!(f, "OK"),
            Some(fail) => write!(
                f,
                "DIVERGENCE at op {}: {}\nminimized to {} ops",
                fail.at,
                fail.message,
                fail.trace.len()
            ),
        }
    }
}

/// Picks the next op, biased towards keys already in the set.
fn next_op(rng: &mut ChaCha8Rng, keys: &mut KeyGen, oracle: &OracleSet) -> Op {
    let n = oracle.len();
    let mut key = |rng: &mut ChaCha8Rng, p_present: f64| {
        if n > 0 && rng.gen_bool(p_present) {
            oracle.keys()[rng.gen_range(0..n as usize)].clone()
        } else {
            keys.next_key(rng)
        }
    };
    match rng.gen_range(0..100) {
        0..=29 => Op::Ins(key(rng, 0.1)),
        30..=49 => Op::Del(key(rng, 0.7)),
        50..=59 => Op::Mem(key(rng, 0.5)),
        60..=69 => Op::Pred(key(rng, 0.5)),
        70..=79 => Op::Succ(key(rng, 0.5)),
        80..=89 => Op::Rank(key(rng, 0.5)),
        _ => Op::Sel(rng.gen_range(0..=n)),
    }
}

/// Runs `op` on `set`, turning errors and panics into messages.
fn guarded<S: OrderedSet>(set: &mut S, op: &Op) -> std::result::Result<Outcome, String> {
    match panic::catch_unwind(AssertUnwindSafe(|| op.apply(set))) {
        Ok(Ok(o)) => Ok(o),
        Ok(Err(e)) => Err(format!("error: {e}")),
        Err(p) => Err(format!("panic: {}", panic_message(&p))),
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}

/// Replays `ops` on a fresh subject and oracle, checking the subject after
/// every op. Returns the first problem found.
pub fn find_failure<S, F>(ops: &[Op], width: u32, make: &F) -> Option<String>
where
    S: Subject,
    F: Fn() -> Result<S>,
{
    let mut subject = match make() {
        Ok(s) => s,
        Err(e) => return Some(format!("cannot build subject: {e}")),
    };
    let mut oracle = OracleSet::new(width);
    for op in ops {
        if let Some(msg) = step(&mut subject, &mut oracle, op) {
            return Some(msg);
        }
        if let Err(e) = subject.check() {
            return Some(format!("after `{op}`: {e}"));
        }
    }
    None
}

fn step<S: Subject>(subject: &mut S, oracle: &mut OracleSet, op: &Op) -> Option<String> {
    let left = guarded(subject, op);
    let right = op.apply(oracle).map_err(|e| format!("error: {e}"));
    if left == right {
        return None;
    }
    let show = |r: &std::result::Result<Outcome, String>| match r {
        Ok(o) => o.to_string(),
        Err(e) => e.clone(),
    };
    Some(format!("`{op}` gave {} (oracle {})", show(&left), show(&right)))
}

/// Delta debugging over op subsequences: removes chunks while the trace
/// still fails, halving the chunk size down to single ops.
pub fn minimize(ops: Vec<Op>, fails: impl Fn(&[Op]) -> bool) -> Vec<Op> {
    let mut ops = ops;
    let mut parts = 2;
    while ops.len() >= 2 {
        let chunk = ops.len().div_ceil(parts);
        let mut reduced = false;
        let mut start = 0;
        while start < ops.len() {
            let end = (start + chunk).min(ops.len());
            let candidate: Vec<Op> = ops[..start].iter().chain(&ops[end..]).cloned().collect();
            if fails(&candidate) {
                ops = candidate;
                reduced = true;
                parts = (parts - 1).max(2);
                break;
            }
            start = end;
        }
        if !reduced {
            if chunk == 1 {
                break;
            }
            parts = (parts * 2).min(ops.len());
        }
    }
    ops
}

/// Fuzzes a [`FusionTree`] against the oracle.
pub fn fuzz(cfg: &FuzzConfig) -> Result<FuzzReport> {
    let (width, k) = (cfg.width, cfg.k);
    FusionTree::new(width, k)?;
    fuzz_with(cfg, &|| FusionTree::new(width, k))
}

/// Fuzzes any subject built by `make` against the oracle. On failure the
/// op stream is cut at the failing op and minimized.
pub fn fuzz_with<S, F>(cfg: &FuzzConfig, make: &F) -> Result<FuzzReport>
where
    S: Subject,
    F: Fn() -> Result<S>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut keys = KeyGen::new(cfg.pattern, cfg.width, cfg.keybits, &mut rng)?;
    let mut subject = make()?;
    let mut oracle = OracleSet::new(cfg.width);
    let mut stats: BTreeMap<OpKind, OpStats> = BTreeMap::new();
    let mut history = Vec::with_capacity(cfg.ops as usize);
    let mut audits = 0;
    let mut failure = None;
    let start = Instant::now();
    for i in 0..cfg.ops {
        let op = next_op(&mut rng, &mut keys, &oracle);
        history.push(op.clone());
        let before = subject.word_ops();
        let problem = step(&mut subject, &mut oracle, &op);
        stats
            .entry(op.kind())
            .or_default()
            .record(subject.word_ops() - before);
        let problem = problem.or_else(|| {
            if cfg.audit_every > 0 && (i + 1) % cfg.audit_every == 0 {
                audits += 1;
                subject.check().err().map(|e| format!("audit after op {i}: {e}"))
            } else {
                None
            }
        });
        if let Some(message) = problem {
            failure = Some((i, message));
            break;
        }
    }
    let elapsed = start.elapsed();
    let executed = history.len() as u64;
    let failure = failure.map(|(at, message)| {
        let hook = panic::take_hook();
        panic::set_hook(Box::new(|_| {}));
        let small = minimize(history, |ops| find_failure(ops, cfg.width, make).is_some());
        panic::set_hook(hook);
        Failure {
            at,
            message,
            trace: OpTrace::from_ops(small),
        }
    });
    Ok(FuzzReport {
        config: cfg.clone(),
        executed,
        audits,
        stats,
        failure,
        elapsed,
    })
}

/// Settings of one benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub pattern: Pattern,
    /// Set sizes to measure at, grown in increasing order.
    pub sizes: Vec<u64>,
    pub width: u32,
    pub k: usize,
    pub keybits: u32,
    pub seed: u64,
    /// Measured ops per class at each size.
    pub samples: u64,
}

impl BenchConfig {
    pub fn new(width: u32, k: usize, sizes: Vec<u64>) -> BenchConfig {
        BenchConfig {
            pattern: Pattern::Random,
            sizes,
            width,
            k,
            keybits: width.min(64),
            seed: 1,
            samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: u64,
    pub kind: OpKind,
    pub height: u32,
    /// Mean word ops per op.
    pub mean_ops: f64,
    pub nanos_per_op: f64,
}

impl BenchRow {
    /// Word ops per op per level of the tree.
    pub fn ratio(&self) -> Option<f64> {
        (self.height > 0).then(|| self.mean_ops / self.height as f64)
    }
}

#[derive(Debug, Clone)]
pub struct BenchTable {
    pub name: String,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    /// Mean over all op classes at size `n` of (word ops per op) / height.
    pub fn mixed_ratio(&self, n: u64) -> Option<f64> {
        let ratios: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.n == n)
            .filter_map(BenchRow::ratio)
            .collect();
        (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
    }
}

impl fmt::Display for BenchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        writeln!(
            f,
            "{:>9} {:<5}{:>7}{:>12}{:>10}{:>12}",
            "n", "op", "height", "ops/op", "ratio", "ns/op"
        )?;
        for r in &self.rows {
            let (ops, ratio) = match r.ratio() {
                Some(q) => (format!("{:.1}", r.mean_ops), format!("{q:.2}")),
                None => ("-".into(), "-".into()),
            };
            writeln!(
                f,
                "{:>9} {:<5}{:>7}{:>12}{:>10}{:>12.0}",
                r.n,
                r.kind.mnemonic(),
                r.height,
                ops,
                ratio,
                r.nanos_per_op
            )?;
        }
        Ok(())
    }
}

/// Grows a subject through `cfg.sizes` and times every op class at each.
///
/// Inserts use fresh keys and are undone by the measured deletes, so the
/// size stays at `n` while measuring.
pub fn bench<S: Subject>(cfg: &BenchConfig, name: &str, mut subject: S) -> Result<BenchTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut keys = KeyGen::new(cfg.pattern, cfg.width, cfg.keybits, &mut rng)?;
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    let mut rows = Vec::new();
    for &n in &sizes {
        while subject.len() < n {
            let batch: Vec<Word> = (subject.len()..n).map(|_| keys.next_key(&mut rng)).collect();
            subject.grow(batch)?;
        }
        let q = cfg.samples.max(1);
        let len = subject.len();
        let mut present = Vec::with_capacity(q as usize);
        for _ in 0..q {
            present.push(subject.select(rng.gen_range(0..len))?);
        }
        let probes: Vec<Word> = (0..q)
            .map(|i| {
                if i % 2 == 0 {
                    present[i as usize].clone()
                } else {
                    keys.next_key(&mut rng)
                }
            })
            .collect();
        let mut fresh = Vec::new();
        while (fresh.len() as u64) < q {
            let x = keys.next_key(&mut rng);
            if !subject.member(&x)? && !fresh.contains(&x) {
                fresh.push(x);
            }
        }
        let ranks: Vec<u64> = (0..q).map(|_| rng.gen_range(0..len)).collect();
        let height = subject.height();
        let mut time = |kind: OpKind, subject: &mut S| -> Result<()> {
            let ops0 = subject.word_ops();
            let t0 = Instant::now();
            for i in 0..q as usize {
                match kind {
                    OpKind::Ins => subject.insert(&fresh[i]).map(drop)?,
                    OpKind::Del => subject.delete(&fresh[i]).map(drop)?,
                    OpKind::Mem => subject.member(&probes[i]).map(drop)?,
                    OpKind::Pred => subject.predecessor(&probes[i]).map(drop)?,
                    OpKind::Succ => subject.successor(&probes[i]).map(drop)?,
                    OpKind::Rank => subject.rank(&probes[i]).map(drop)?,
                    OpKind::Sel => subject.select(ranks[i]).map(drop)?,
                }
            }
            rows.push(BenchRow {
                n,
                kind,
                height,
                mean_ops: (subject.word_ops() - ops0) as f64 / q as f64,
                nanos_per_op: t0.elapsed().as_nanos() as f64 / q as f64,
            });
            Ok(())
        };
        for kind in OpKind::ALL {
            time(kind, &mut subject)?;
        }
    }
    Ok(BenchTable {
        name: name.to_string(),
        rows,
    })
}
