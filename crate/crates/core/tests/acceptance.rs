//! Acceptance checks. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line even when it succeeds.

use std::collections::{BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dynfusion::harness::{self, BenchConfig, FuzzConfig, Pattern};
use dynfusion::wordops::packed_rank;
use dynfusion::{Compressor, FusionNode, FusionTree, NodeLayout, Word, WordContext};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Check); 7] = [
        ("figure 1 golden node", Duration::from_secs(1), figure_one),
        ("exhaustive 5-bit universe", Duration::from_secs(60), small_universe),
        ("differential fuzz", Duration::from_secs(600), differential_fuzz),
        ("structure audits", Duration::from_secs(600), structure_audits),
        ("word ops per level", Duration::from_secs(300), complexity),
        ("packed rank", Duration::from_secs(120), packed_rank_agrees),
        ("compressor round trip", Duration::from_secs(120), compressor_round_trip),
    ];
    // Optional criterion numbers on the command line select a subset.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {p:?}")));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > limit => Err(format!("took {took:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {took:.1?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn permutations(items: &[u64]) -> Vec<Vec<u64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

// 1 -------------------------------------------------------------------------

fn figure_one() -> Result<String, String> {
    // Keys with ranks 0..4 and their compressed forms over positions 6 5 3 1.
    let keys = [0x91u64, 0x92, 0xD2, 0xDA, 0xFA];
    let compressed = [0b0000u64, 0b0001, 0b1001, 0b1011, 0b1111];
    // Rows from rank 4 down, columns from position 6 down.
    let grid = ["11??", "101?", "100?", "0??1", "0??0"];
    let ctx = WordContext::new(256).map_err(|e| e.to_string())?;
    let layout = Arc::new(NodeLayout::with_capacity(256, 4, 5).map_err(|e| e.to_string())?);
    let orders = permutations(&keys);
    for order in &orders {
        let mut node = FusionNode::with_layout(Arc::clone(&layout));
        for &x in order {
            node.insert(&ctx, &ctx.word(x)).map_err(|e| e.to_string())?;
        }
        let comp = node.compressor();
        ensure(comp.positions() == [1, 3, 5, 6], || {
            format!("order {order:x?}: positions {:?}", comp.positions())
        })?;
        for (x, c) in keys.iter().zip(compressed) {
            let got = comp.compress(&ctx, &ctx.word(*x));
            ensure(got == ctx.word(c), || format!("order {order:x?}: {x:#x} compresses to {got}"))?;
        }
        let mut rows = node.pattern_rows();
        rows.reverse();
        ensure(rows == grid, || format!("order {order:x?}: grid {rows:?}"))?;
    }
    Ok(format!("{} insertion orders", orders.len()))
}

// 2 -------------------------------------------------------------------------

fn small_universe() -> Result<String, String> {
    const U: u64 = 32;
    let ctx = WordContext::new(256).map_err(|e| e.to_string())?;
    let layout = Arc::new(NodeLayout::new(256, 4).map_err(|e| e.to_string())?);
    let words: Vec<Word> = (0..U).map(|x| ctx.word(x)).collect();
    let mut subsets: Vec<Vec<u64>> = vec![vec![]];
    for size in 1..=4 {
        let mut combo: Vec<u64> = (0..size).collect();
        loop {
            subsets.push(combo.clone());
            let Some(i) = (0..size as usize).rev().find(|&i| combo[i] < U - size + i as u64) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..size as usize {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    let check = |node: &FusionNode, set: &[u64], what: &str| -> Result<(), String> {
        for x in 0..U {
            let want = set.iter().filter(|&&y| y < x).count();
            let got = node.rank(&ctx, &words[x as usize]);
            ensure(got == want, || format!("{what}: rank({x}) = {got}, want {want}"))?;
        }
        for (i, y) in set.iter().enumerate() {
            let got = node.select(&ctx, i).map_err(|e| e.to_string())?;
            ensure(got == words[*y as usize], || format!("{what}: select({i}) = {got}"))?;
        }
        ensure(node.select(&ctx, set.len()).is_err(), || format!("{what}: select past end"))
    };
    // Answers depend only on the keys, the don't-care pattern and the
    // positions, so the queries run once per subset on the node built in
    // ascending order; every other order must reach the same state.
    type Shape = (Vec<Word>, Word, Word, Vec<u32>);
    let shape = |node: &FusionNode| -> Shape {
        let positions = node.compressor().positions();
        (node.keys(), node.branch().clone(), node.free().clone(), positions)
    };
    let mut canonical: HashMap<Vec<u64>, Shape> = HashMap::new();
    for subset in &subsets {
        let mut node = FusionNode::with_layout(Arc::clone(&layout));
        for &x in subset {
            ensure(node.insert(&ctx, &words[x as usize]).map_err(|e| e.to_string())?, || {
                format!("insert {x} into {subset:?}")
            })?;
        }
        check(&node, subset, &format!("subset {subset:?}"))?;
        canonical.insert(subset.clone(), shape(&node));
    }
    let mut orders = 0u64;
    for subset in &subsets {
        for order in permutations(subset) {
            orders += 1;
            let what = format!("order {order:?}");
            let mut node = FusionNode::with_layout(Arc::clone(&layout));
            let mut set: BTreeSet<u64> = BTreeSet::new();
            for &x in &order {
                let added = node.insert(&ctx, &words[x as usize]).map_err(|e| e.to_string())?;
                ensure(added && set.insert(x), || format!("{what}: insert {x}"))?;
            }
            ensure(shape(&node) == canonical[subset], || format!("{what}: state differs"))?;
            if let Some(&x) = order.first() {
                let again = node.insert(&ctx, &words[x as usize]).map_err(|e| e.to_string())?;
                ensure(!again, || format!("{what}: duplicate insert of {x}"))?;
            }
            for &x in &order {
                ensure(node.delete(&ctx, &words[x as usize]), || format!("{what}: delete {x}"))?;
                set.remove(&x);
                ensure(!node.delete(&ctx, &words[x as usize]), || format!("{what}: delete {x} twice"))?;
                let rest: Vec<u64> = set.iter().copied().collect();
                ensure(shape(&node) == canonical[&rest], || {
                    format!("{what}: state after deleting {x} differs")
                })?;
            }
        }
    }
    Ok(format!("{} subsets, {orders} insertion orders", subsets.len()))
}

// 3 and 4 -----------------------------------------------------------------

const GEOMETRIES: [(u32, usize, u32); 3] = [(256, 4, 256), (4096, 8, 256), (65536, 16, 128)];

fn fuzz_runs() -> &'static Result<Vec<harness::FuzzReport>, String> {
    static RUNS: std::sync::OnceLock<Result<Vec<harness::FuzzReport>, String>> =
        std::sync::OnceLock::new();
    RUNS.get_or_init(|| {
        let mut reports = Vec::new();
        for (g, &(width, k, keybits)) in GEOMETRIES.iter().enumerate() {
            for (p, pattern) in Pattern::ALL.into_iter().enumerate() {
                let cfg = FuzzConfig {
                    seed: 100 + 10 * g as u64 + p as u64,
                    ops: 100_000,
                    width,
                    k,
                    keybits,
                    pattern,
                    audit_every: 1000,
                };
                reports.push(harness::fuzz(&cfg).map_err(|e| e.to_string())?);
            }
        }
        Ok(reports)
    })
}

fn differential_fuzz() -> Result<String, String> {
    let reports = fuzz_runs().as_ref()?;
    let mut total = 0;
    for r in reports {
        if let Some(f) = &r.failure {
            return Err(format!(
                "W={} k={} {}: {} (minimal trace:\n{})",
                r.config.width, r.config.k, r.config.pattern, f.message, f.trace
            ));
        }
        total += r.executed;
    }
    Ok(format!("{} runs, {total} ops, no divergence", reports.len()))
}

fn structure_audits() -> Result<String, String> {
    let reports = fuzz_runs().as_ref()?;
    let audits: u64 = reports.iter().map(|r| r.audits).sum();
    let expected: u64 = reports.iter().map(|r| r.config.ops / 1000).sum();
    ensure(reports.iter().all(|r| r.ok()), || "a fuzz run failed".into())?;
    ensure(audits == expected, || format!("{audits} audits, expected {expected}"))?;
    Ok(format!("{audits} deep audits"))
}

// 5 -------------------------------------------------------------------------

fn complexity() -> Result<String, String> {
    let (width, k) = (65536, 16);
    let sizes = vec![1_000, 10_000, 100_000, 1_000_000];
    let mut cfg = BenchConfig::new(width, k, sizes.clone());
    cfg.seed = 5;
    let tree = FusionTree::new(width, k).map_err(|e| e.to_string())?;
    let table = harness::bench(&cfg, "fusion", tree).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = sizes.iter().map(|&n| table.mixed_ratio(n).unwrap()).collect();
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    ensure(hi / lo <= 1.5, || format!("ratios {ratios:.1?} spread {:.2}", hi / lo))?;
    // Weight bounds: a height-h node holds at least (k/4)^(h-1) k / 4 keys.
    let top = table.rows.iter().filter(|r| r.n == 1_000_000).map(|r| r.height).max().unwrap();
    let bound = ((1e6f64 / 16.0).ln() / 4f64.ln()).ceil() as u32 + 2;
    ensure(top <= bound, || format!("height {top} at n = 10^6, bound {bound}"))?;

    let node = node_op_maxima(width, k);
    ensure(node[0] <= 40 && node[1] <= 40 && node[2] <= 300 && node[3] <= 300, || {
        format!("node op maxima rank/select/insert/delete = {node:?}")
    })?;
    Ok(format!(
        "ratios {ratios:.1?} spread {:.2}, height {top} <= {bound}, node maxima {node:?}",
        hi / lo
    ))
}

/// Worst word-op counts of rank, select, insert and delete on one node.
fn node_op_maxima(width: u32, k: usize) -> [u64; 4] {
    let ctx = WordContext::new(width).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst = [0u64; 4];
    let mut measure = |slot: usize, ctx: &WordContext, before: u64| {
        worst[slot] = worst[slot].max(ctx.ops() - before);
    };
    for round in 0..40 {
        let mut node = FusionNode::new(width, k).unwrap();
        for _ in 0..400 {
            let x = match round % 3 {
                0 => ctx.word(rng.gen()),
                1 => ctx.word(rng.gen_range(0..256)),
                _ => Word::from_limbs(width, &(0..width / 64).map(|_| rng.gen()).collect::<Vec<u64>>()),
            };
            let before = ctx.ops();
            node.rank(&ctx, &x);
            measure(0, &ctx, before);
            if !node.is_empty() {
                let before = ctx.ops();
                node.select(&ctx, rng.gen_range(0..node.len())).unwrap();
                measure(1, &ctx, before);
            }
            if node.is_full() || (!node.is_empty() && rng.gen_bool(0.4)) {
                let y = node.keys()[rng.gen_range(0..node.len())].clone();
                let before = ctx.ops();
                node.delete(&ctx, &y);
                measure(3, &ctx, before);
            } else {
                let before = ctx.ops();
                node.insert(&ctx, &x).unwrap();
                measure(2, &ctx, before);
            }
        }
    }
    worst
}

// 6 -------------------------------------------------------------------------

fn packed_rank_agrees() -> Result<String, String> {
    let ctx = WordContext::new(64).map_err(|e| e.to_string())?;
    let mut cases = 0u64;
    let mut worst = 0;
    let mut check = |tuple: &[u64], f: u32, x: u64| -> Result<(), String> {
        let a = tuple.iter().enumerate().fold(0u64, |a, (i, &v)| a | v << (i as u32 * f));
        let before = ctx.ops();
        let got = packed_rank(&ctx, &ctx.word(x), &ctx.word(a), tuple.len(), f)
            .map_err(|e| e.to_string())?;
        worst = worst.max(ctx.ops() - before);
        let want = tuple.iter().filter(|&&v| v < x).count();
        cases += 1;
        ensure(got == want, || format!("f={f} {tuple:?} x={x}: {got}, want {want}"))
    };
    for f in [3u32, 4] {
        let top = 1u64 << (f - 1);
        for m in 1..=6 {
            let mut tuple = vec![0u64; m];
            loop {
                for x in 0..top {
                    check(&tuple, f, x)?;
                }
                // Next non-decreasing tuple.
                let Some(i) = (0..m).rev().find(|&i| tuple[i] + 1 < top) else {
                    break;
                };
                let v = tuple[i] + 1;
                tuple[i..].iter_mut().for_each(|t| *t = v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1_000_000 {
        let m = rng.gen_range(1..=6);
        let mut tuple: Vec<u64> = (0..m).map(|_| rng.gen_range(0..16)).collect();
        tuple.sort_unstable();
        check(&tuple, 5, rng.gen_range(0..16))?;
    }
    ensure(worst <= 8, || format!("{worst} ops in one call"))?;
    Ok(format!("{cases} cases, at most {worst} ops"))
}

// 7 -------------------------------------------------------------------------

fn extract(x: &Word, positions: &[u32]) -> BigUint {
    let big = BigUint::from_slice(
        &x.to_limbs()
            .iter()
            .flat_map(|l| [*l as u32, (*l >> 32) as u32])
            .collect::<Vec<u32>>(),
    );
    positions
        .iter()
        .enumerate()
        .filter(|(_, &p)| big.bit(p as u64))
        .fold(BigUint::default(), |acc, (i, _)| acc | (BigUint::from(1u8) << i))
}

fn to_big(x: &Word) -> BigUint {
    let digits = x.to_hex();
    BigUint::parse_bytes(&digits.as_bytes()[2..], 16).unwrap()
}

fn compressor_round_trip() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let geometries = [(256u32, 4usize), (4096, 8), (65536, 16)];
    let mut mutations = 0;
    for run in 0..10_000 {
        let (width, k) = geometries[run % 3];
        let ctx = WordContext::new(width).map_err(|e| e.to_string())?;
        let mut comp = Compressor::new(width, k).map_err(|e| e.to_string())?;
        let mut set: BTreeSet<u32> = BTreeSet::new();
        for _ in 0..12 {
            let add = set.is_empty() || (set.len() < k && rng.gen_bool(0.6));
            if add {
                // Nearby positions stress blocks that hold several.
                let c = if rng.gen_bool(0.5) {
                    rng.gen_range(0..width)
                } else {
                    rng.gen_range(0..width.min(3 * (width / (k * k) as u32)))
                };
                if !set.insert(c) {
                    continue;
                }
                comp.add_position(&ctx, c).map_err(|e| e.to_string())?;
            } else {
                let c = *set.iter().nth(rng.gen_range(0..set.len())).unwrap();
                set.remove(&c);
                comp.remove_position(&ctx, c).map_err(|e| e.to_string())?;
            }
            mutations += 1;
            let positions: Vec<u32> = set.iter().copied().collect();
            ensure(comp.positions() == positions, || format!("positions {:?}", comp.positions()))?;
            let mut probes = vec![
                Word::from_bit_positions(width, positions.iter().copied()),
                Word::ones(width),
            ];
            for _ in 0..4 {
                let limbs: Vec<u64> = (0..width / 64).map(|_| rng.gen()).collect();
                probes.push(Word::from_limbs(width, &limbs));
            }
            for x in &probes {
                let got = to_big(&comp.compress(&ctx, x));
                let want = extract(x, &positions);
                ensure(got == want, || format!("W={width} positions {positions:?}: {x} gives {got:x}, want {want:x}"))?;
            }
        }
    }
    Ok(format!("10000 interleavings, {mutations} mutations"))
}
