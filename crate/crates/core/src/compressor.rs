//! Perfect dynamic key compression.
//!
//! A [`Compressor`] keeps up to `k` significant bit positions
//! `c_0 < c_1 < ...` and maps a key `x` to the compressed key whose bit `h`
//! is bit `c_h` of `x`, in a constant number of word operations.
//!
//! Compression happens in two steps. Packing splits the word into `k^2`
//! blocks of `b = W/k^2` bits and shifts every block by its own small amount
//! `s_i < k^2/2` so that all significant bits land, collision free, in a
//! `2b`-bit window. Reordering then moves the bit at packed position `mu_h`
//! to position `h` with one multiplication by `LSHIFT` and one by a fixed
//! gathering constant.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::word::{Word, WordContext};
use crate::wordops::{self, PackedRanker};

/// Geometry and constants shared by every compressor with the same `(W, k)`.
#[derive(Debug)]
pub struct CompressorLayout {
    width: u32,
    k: usize,
    b: u32,
    /// Field width of `C`: one bit more than a bit index needs.
    c_field: u32,
    /// `(0^b 1^b)^{W/2b}`: the even blocks.
    even_blocks: Word,
    /// `k^2/2` fields of width `2b`, field `s` holds `1 << s`.
    s0: Word,
    /// `k` fields of width `4b`, field `k-1-h` holds `1 << h`.
    s1: Word,
    /// `1 << 3b/2` in each of the `k^2/2` fields of width `2b`.
    probe: Word,
    /// Repeats a `2b`-bit value over the `k^2/2` probe fields.
    probe_ones: Word,
    /// `(0^{4b-1} 1)^k`.
    lshift_units: Word,
    c_rank: PackedRanker,
}

impl CompressorLayout {
    pub fn new(width: u32, k: usize) -> Result<CompressorLayout> {
        check_geometry(width, k)?;
        let k2 = (k * k) as u32;
        let b = width / k2;
        let c_field = width.trailing_zeros() + 1;
        let even_blocks = Word::from_bit_positions(width, (0..k2 / 2).map(|i| 2 * i * b))
            .raw_mul(&Word::low_mask(width, b));
        let s0 = Word::from_bit_positions(width, (0..k2 / 2).map(|s| s * 2 * b + s));
        let s1 = Word::from_bit_positions(
            width,
            (0..k as u32).map(|h| (k as u32 - 1 - h) * 4 * b + h),
        );
        let probe_ones = wordops::unit_pattern(width, 2 * b, k2 as usize / 2);
        let probe = probe_ones.raw_shl(3 * b / 2);
        let lshift_units = wordops::unit_pattern(width, 4 * b, k);
        Ok(CompressorLayout {
            width,
            k,
            b,
            c_field,
            even_blocks,
            s0,
            s1,
            probe,
            probe_ones,
            lshift_units,
            c_rank: PackedRanker::new(width, c_field, k),
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Block size `b = W / k^2` in bits.
    pub fn block_size(&self) -> u32 {
        self.b
    }

    fn blocks(&self) -> u32 {
        self.width / self.b
    }

    fn max_shift(&self) -> u32 {
        (self.k * self.k / 2) as u32
    }

    /// Bit offset of block `i`'s field in `BSHIFT` (reversed order).
    fn bshift_offset(&self, block: u32) -> u32 {
        (self.blocks() - 1 - block) * self.b
    }

    fn initial_bshift(&self) -> Word {
        Word::from_bit_positions(self.width, (0..self.blocks()).map(|i| i * self.b))
    }
}

/// Validates `k` against `W`: a power of two with `4 <= k` and `k^4 <= W`.
pub fn check_geometry(width: u32, k: usize) -> Result<()> {
    let k4 = (k as u128).pow(4);
    if !k.is_power_of_two() || k < 4 || k4 > width as u128 {
        return Err(Error::InvalidConfig(format!(
            "k = {k} must be a power of two with 4 <= k and k^4 <= {width}"
        )));
    }
    Ok(())
}

/// The default node capacity: the largest power of two `k` with `k^4 <= W`.
pub fn default_k(width: u32) -> usize {
    1usize << (width.trailing_zeros() / 4)
}

/// Maintains the significant positions and compresses keys.
#[derive(Debug, Clone)]
pub struct Compressor {
    layout: Arc<CompressorLayout>,
    /// Significant positions as a bit mask.
    mask: Word,
    bshift: Word,
    /// `(BSHIFT >> b) & E_b` and `BSHIFT & E_b`, the multipliers for the even
    /// and odd blocks.
    mult_even: Word,
    mult_odd: Word,
    /// Sorted positions, one per field.
    c: Word,
    lshift: Word,
    ell: usize,
}

impl Compressor {
    pub fn new(width: u32, k: usize) -> Result<Compressor> {
        Ok(Compressor::with_layout(Arc::new(CompressorLayout::new(width, k)?)))
    }

    pub fn with_layout(layout: Arc<CompressorLayout>) -> Compressor {
        let w = layout.width;
        let bshift = layout.initial_bshift();
        let mut comp = Compressor {
            mask: Word::zero(w),
            mult_even: Word::zero(w),
            mult_odd: Word::zero(w),
            c: Word::zero(w),
            lshift: Word::zero(w),
            ell: 0,
            bshift,
            layout,
        };
        comp.refresh_multipliers_raw();
        comp
    }

    pub fn layout(&self) -> &Arc<CompressorLayout> {
        &self.layout
    }

    /// Number of significant positions.
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// The significant positions in ascending order (not counted).
    pub fn positions(&self) -> Vec<u32> {
        self.mask.set_bits()
    }

    fn refresh_multipliers_raw(&mut self) {
        let l = &self.layout;
        self.mult_even = self.bshift.raw_shr(l.b).raw_and(&l.even_blocks);
        self.mult_odd = self.bshift.raw_and(&l.even_blocks);
    }

    fn refresh_multipliers(&mut self, ctx: &WordContext) {
        let l = &self.layout;
        let shifted = ctx.shr(&self.bshift, l.b);
        self.mult_even = ctx.and(&shifted, &l.even_blocks);
        self.mult_odd = ctx.and(&self.bshift, &l.even_blocks);
    }

    /// The packed image of `x`: its significant bits inside a `2b`-bit
    /// window. Eight word operations.
    pub fn pack(&self, ctx: &WordContext, x: &Word) -> Word {
        let masked = ctx.and(x, &self.mask);
        self.pack_masked(ctx, &masked)
    }

    /// Packs a word whose bits all lie in blocks with valid shifts.
    fn pack_masked(&self, ctx: &WordContext, xb: &Word) -> Word {
        let l = &self.layout;
        let even = ctx.and(xb, &l.even_blocks);
        let even = ctx.mul(&even, &self.mult_even);
        let odd = ctx.shr(xb, l.b);
        let odd = ctx.and(&odd, &l.even_blocks);
        let odd = ctx.mul(&odd, &self.mult_odd);
        let sum = ctx.add(&even, &odd);
        ctx.shr(&sum, l.width - 2 * l.b)
    }

    /// The compressed key: bit `h` is bit `c_h` of `x`, higher bits are
    /// zero. Fourteen word operations.
    pub fn compress(&self, ctx: &WordContext, x: &Word) -> Word {
        let l = &self.layout;
        let packed = self.pack(ctx, x);
        let spread = ctx.mul(&self.lshift, &packed);
        let spread = ctx.shr(&spread, 2 * l.b);
        let spread = ctx.and(&spread, &l.lshift_units);
        let gathered = ctx.mul(&l.s1, &spread);
        let gathered = ctx.shr(&gathered, (l.k as u32 - 1) * 4 * l.b);
        // The gathering product leaves stray copies above bit k.
        ctx.and(&gathered, &Word::low_mask(l.width, l.k as u32))
    }

    /// `#{h : c_h < j}`.
    pub fn position_rank(&self, ctx: &WordContext, j: u64) -> usize {
        if j >= self.layout.width as u64 {
            return self.ell;
        }
        let q = Word::from_u64(self.layout.width, j);
        self.layout.c_rank.rank(ctx, &q, &self.c, self.ell)
    }

    /// `c_h`, read from `C`.
    pub fn position(&self, ctx: &WordContext, h: usize) -> Result<u32> {
        if h >= self.ell {
            return Err(Error::NoSuchRank {
                rank: h as u64,
                len: self.ell as u64,
            });
        }
        let field = wordops::field_get(ctx, &self.c, h, self.layout.c_field)?;
        Ok(field.low_u64() as u32)
    }

    /// Whether bit `c` is significant: one word operation.
    pub fn is_significant(&self, ctx: &WordContext, c: u32) -> bool {
        !ctx.and(&self.mask, &Word::bit(self.layout.width, c)).is_zero()
    }

    /// Makes bit `c` significant and returns its rank among the positions.
    pub fn add_position(&mut self, ctx: &WordContext, c: u32) -> Result<usize> {
        let l = Arc::clone(&self.layout);
        let w = l.width;
        if c >= w {
            return Err(Error::Usage(format!("position {c} outside {w}-bit word")));
        }
        if self.ell >= l.k {
            return Err(Error::Usage(format!(
                "compressor already holds its maximum of {} positions",
                l.k
            )));
        }
        if self.is_significant(ctx, c) {
            return Err(Error::Usage(format!("position {c} is already significant")));
        }
        let h = self.position_rank(ctx, c as u64);

        let block = c / l.b;
        let block_mask = Word::range_mask(w, block * l.b, (block + 1) * l.b);
        let field_mask = Word::range_mask(w, l.bshift_offset(block), l.bshift_offset(block) + l.b);
        let old_shift = ctx.lsb(&ctx.and(&self.bshift, &field_mask))
            .map_or(0, |p| p - l.bshift_offset(block));

        // Candidate shifts for the block, tested against the packing of
        // every other block at once.
        let others = ctx.and_not(&self.mask, &block_mask);
        let others = self.pack_masked(ctx, &others);
        let others = ctx.mul(&others, &l.probe_ones);
        let bits = ctx.shr(&self.mask, block * l.b);
        let bits = ctx.and(&bits, &Word::low_mask(w, l.b));
        let bits = ctx.or(&bits, &Word::bit(w, c - block * l.b));
        let shifted = ctx.mul(&l.s0, &bits);
        let clashes = ctx.and(&others, &shifted);
        let free = ctx.sub(&l.probe, &clashes);
        let free = ctx.and(&free, &l.probe);
        let new_shift = match ctx.lsb(&free) {
            Some(p) => p / (2 * l.b),
            None => {
                return Err(Error::Audit(format!(
                    "no collision-free shift for block {block}"
                )))
            }
        };

        if new_shift != old_shift {
            let cleared = ctx.and_not(&self.bshift, &field_mask);
            let unit = Word::bit(w, l.bshift_offset(block) + new_shift);
            self.bshift = ctx.or(&cleared, &unit);
            self.refresh_multipliers(ctx);
            // Existing positions of this block move by the same amount.
            let h0 = self.position_rank(ctx, (block * l.b) as u64);
            let h1 = self.position_rank(ctx, ((block + 1) * l.b) as u64);
            if h0 < h1 {
                let range = Word::range_mask(w, h0 as u32 * 4 * l.b, h1 as u32 * 4 * l.b);
                let part = ctx.and(&self.lshift, &range);
                let rest = ctx.and_not(&self.lshift, &range);
                let part = if old_shift > new_shift {
                    ctx.shl(&part, old_shift - new_shift)
                } else {
                    ctx.shr(&part, new_shift - old_shift)
                };
                self.lshift = ctx.or(&rest, &part);
            }
        }

        self.mask = ctx.or(&self.mask, &Word::bit(w, c));
        let opened = wordops::open_field(ctx, &self.c, h, l.c_field);
        let value = Word::from_u64(w, c as u64).raw_shl(h as u32 * l.c_field);
        self.c = ctx.or(&opened, &value);
        let mu = c - block * l.b + new_shift;
        let opened = wordops::open_field(ctx, &self.lshift, h, 4 * l.b);
        let value = Word::bit(w, h as u32 * 4 * l.b + 2 * l.b - mu);
        self.lshift = ctx.or(&opened, &value);
        self.ell += 1;
        Ok(h)
    }

    /// Makes bit `c` insignificant. Block shifts are left as they are.
    pub fn remove_position(&mut self, ctx: &WordContext, c: u32) -> Result<()> {
        if c >= self.layout.width || !self.is_significant(ctx, c) {
            return Err(Error::Usage(format!("position {c} is not significant")));
        }
        let h = self.position_rank(ctx, c as u64);
        self.remove_at(ctx, c, h);
        Ok(())
    }

    /// Removes the position of rank `h` and returns it.
    pub(crate) fn remove_rank(&mut self, ctx: &WordContext, h: usize) -> Result<u32> {
        let c = self.position(ctx, h)?;
        self.remove_at(ctx, c, h);
        Ok(c)
    }

    fn remove_at(&mut self, ctx: &WordContext, c: u32, h: usize) {
        let l = &self.layout;
        let w = l.width;
        self.mask = ctx.and_not(&self.mask, &Word::bit(w, c));
        self.c = wordops::close_field(ctx, &self.c, h, l.c_field);
        self.lshift = wordops::close_field(ctx, &self.lshift, h, 4 * l.b);
        self.ell -= 1;
    }

    /// Shift of block `i` (not counted).
    pub fn shift(&self, block: u32) -> u32 {
        let l = &self.layout;
        let lo = l.bshift_offset(block);
        self.bshift.lsb_in(lo, lo + l.b).unwrap_or(0)
    }

    /// `(block, shift)` for every block holding a significant position.
    pub fn shifts(&self) -> Vec<(u32, u32)> {
        let mut blocks: Vec<u32> = self.positions().iter().map(|c| c / self.layout.b).collect();
        blocks.dedup();
        blocks.into_iter().map(|i| (i, self.shift(i))).collect()
    }

    /// `(c_h, mu_h)` for every significant position, in rank order.
    pub fn packed_positions(&self) -> Vec<(u32, u32)> {
        let b = self.layout.b;
        self.positions()
            .into_iter()
            .map(|c| (c, c % b + self.shift(c / b)))
            .collect()
    }

    /// Recomputes every derived word from the positions and shifts and
    /// compares.
    pub fn audit(&self) -> Result<()> {
        let l = &self.layout;
        let w = l.width;
        let fail = |msg: String| Err(Error::Audit(msg));
        let positions = self.positions();
        if positions.len() != self.ell || self.ell > l.k {
            return fail(format!("ell {} but {} positions", self.ell, positions.len()));
        }
        let mut c = Word::zero(w);
        let mut lshift = Word::zero(w);
        let mut seen = HashSet::new();
        let scratch = WordContext::new(w)?;
        for (h, &(pos, mu)) in self.packed_positions().iter().enumerate() {
            if self.shift(pos / l.b) >= l.max_shift() || mu >= 2 * l.b {
                return fail(format!("position {pos} packs to {mu}, outside the window"));
            }
            if !seen.insert(mu) {
                return fail(format!("packed position {mu} used twice"));
            }
            let packed = self.pack(&scratch, &Word::bit(w, pos));
            if packed != Word::bit(w, mu) {
                return fail(format!("position {pos} packs to {packed}, expected bit {mu}"));
            }
            c = c.raw_or(&Word::from_u64(w, pos as u64).raw_shl(h as u32 * l.c_field));
            lshift = lshift.raw_or(&Word::bit(w, h as u32 * 4 * l.b + 2 * l.b - mu));
        }
        if c != self.c {
            return fail(format!("C is {} but positions give {}", self.c, c));
        }
        if lshift != self.lshift {
            return fail("LSHIFT disagrees with the packed positions".into());
        }
        for block in 0..l.blocks() {
            let lo = l.bshift_offset(block);
            let ones = self.bshift.popcount_in(lo, lo + l.b);
            if ones != 1 || self.shift(block) >= l.max_shift() {
                return fail(format!("BSHIFT field of block {block} has {ones} bits set"));
            }
        }
        let mut fresh = self.clone();
        fresh.refresh_multipliers_raw();
        if fresh.mult_even != self.mult_even || fresh.mult_odd != self.mult_odd {
            return fail("cached block multipliers are stale".into());
        }
        Ok(())
    }
}

impl PartialEq for Compressor {
    /// Two compressors are equal when they have the same geometry and
    /// positions; block shifts are an implementation detail.
    fn eq(&self, other: &Compressor) -> bool {
        self.layout.width == other.layout.width
            && self.layout.k == other.layout.k
            && self.mask == other.mask
    }
}

impl Eq for Compressor {}

impl fmt::Display for Compressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.layout;
        writeln!(f, "W={} k={} b={} ell={}", l.width, l.k, l.b, self.ell)?;
        let list = |v: Vec<String>| v.join(" ");
        writeln!(
            f,
            "positions: {}",
            list(self.positions().iter().map(u32::to_string).collect())
        )?;
        writeln!(
            f,
            "shifts: {}",
            list(self.shifts().iter().map(|(i, s)| format!("{i}:{s}")).collect())
        )?;
        write!(
            f,
            "packed: {}",
            list(
                self.packed_positions()
                    .iter()
                    .map(|(c, mu)| format!("{c}->{mu}"))
                    .collect()
            )
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn extract(x: &Word, positions: &[u32]) -> u64 {
        positions
            .iter()
            .enumerate()
            .map(|(h, &c)| (x.bit_is_set(c) as u64) << h)
            .sum()
    }

    fn build(width: u32, k: usize, positions: &[u32]) -> (WordContext, Compressor) {
        let ctx = WordContext::new(width).unwrap();
        let mut comp = Compressor::new(width, k).unwrap();
        for &p in positions {
            comp.add_position(&ctx, p).unwrap();
            comp.audit().unwrap();
        }
        (ctx, comp)
    }

    #[test]
    fn geometry_rules() {
        assert!(Compressor::new(256, 4).is_ok());
        assert!(Compressor::new(256, 8).is_err());
        assert!(Compressor::new(4096, 6).is_err());
        assert!(Compressor::new(64, 2).is_err());
        assert_eq!(default_k(256), 4);
        assert_eq!(default_k(4096), 8);
        assert_eq!(default_k(65536), 16);
        assert_eq!(default_k(1 << 20), 32);
    }

    #[test]
    fn figure_one_keys() {
        for order in [[1, 3, 5, 6], [6, 5, 3, 1], [5, 1, 6, 3]] {
            let (ctx, comp) = build(256, 4, &order);
            assert_eq!(comp.positions(), vec![1, 3, 5, 6]);
            assert_eq!(comp.compress(&ctx, &ctx.word(0xDA)), ctx.word(0b1011));
            assert_eq!(comp.compress(&ctx, &ctx.word(0xFA)), ctx.word(0b1111));
            assert_eq!(comp.compress(&ctx, &ctx.word(0x91)), ctx.word(0));
            assert_eq!(comp.compress(&ctx, &ctx.word(0x92)), ctx.word(0b0001));
            assert_eq!(comp.compress(&ctx, &ctx.word(0xD2)), ctx.word(0b1001));
            assert_eq!(comp.position_rank(&ctx, 4), 2);
            assert_eq!(comp.position_rank(&ctx, 0), 0);
            assert_eq!(comp.position_rank(&ctx, 256), 4);
        }
    }

    #[test]
    fn empty_compressor_maps_to_zero() {
        let (ctx, comp) = build(256, 4, &[]);
        assert_eq!(comp.compress(&ctx, &Word::ones(256)), ctx.zero());
        assert_eq!(comp.pack(&ctx, &Word::ones(256)), ctx.zero());
    }

    #[test]
    fn single_position() {
        let (ctx, comp) = build(256, 4, &[6]);
        assert_eq!(comp.compress(&ctx, &ctx.word(0x40)), ctx.word(1));
        assert_eq!(comp.compress(&ctx, &ctx.word(0xBF)), ctx.word(0));
    }

    #[test]
    fn same_block_positions_stay_distinct() {
        for (w, k) in [(256, 4), (4096, 8), (65536, 16)] {
            let positions: Vec<u32> = (0..k as u32).map(|i| 3 * i + 1).collect();
            let (ctx, comp) = build(w, k, &positions);
            let packed = comp.pack(&ctx, &Word::from_bit_positions(w, positions.clone()));
            assert_eq!(packed.raw_popcount() as usize, k);
        }
    }

    #[test]
    fn add_remove_errors() {
        let (ctx, mut comp) = build(256, 4, &[1, 3]);
        assert!(comp.add_position(&ctx, 1).is_err());
        assert!(comp.remove_position(&ctx, 2).is_err());
        assert!(comp.add_position(&ctx, 256).is_err());
        comp.add_position(&ctx, 200).unwrap();
        comp.add_position(&ctx, 201).unwrap();
        assert!(comp.add_position(&ctx, 202).is_err(), "capacity is k");
        comp.remove_position(&ctx, 201).unwrap();
        comp.remove_position(&ctx, 3).unwrap();
        comp.audit().unwrap();
        assert_eq!(comp.positions(), vec![1, 200]);
    }

    #[test]
    fn round_trip_restores_compression() {
        let (ctx, mut comp) = build(4096, 8, &[10, 700, 701, 3000]);
        let before = comp.clone();
        comp.add_position(&ctx, 702).unwrap();
        comp.remove_position(&ctx, 702).unwrap();
        comp.audit().unwrap();
        assert_eq!(comp, before);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let limbs: Vec<u64> = (0..64).map(|_| rng.gen()).collect();
            let x = Word::from_limbs(4096, &limbs);
            assert_eq!(comp.compress(&ctx, &x), before.compress(&ctx, &x));
        }
    }

    #[test]
    fn removing_everything_leaves_zero_map() {
        let (ctx, mut comp) = build(256, 4, &[9, 100]);
        comp.remove_position(&ctx, 100).unwrap();
        comp.remove_position(&ctx, 9).unwrap();
        assert_eq!(comp.ell(), 0);
        assert_eq!(comp.compress(&ctx, &Word::ones(256)), ctx.zero());
    }

    #[test]
    fn random_interleavings_match_extraction() {
        for (w, k) in [(256, 4), (4096, 8), (65536, 16)] {
            let ctx = WordContext::new(w).unwrap();
            let mut comp = Compressor::new(w, k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(w as u64);
            let mut live: Vec<u32> = Vec::new();
            for _ in 0..300 {
                let add = live.is_empty() || (live.len() < k && rng.gen_bool(0.6));
                if add {
                    // Bias towards few blocks to force shift collisions.
                    let c = if rng.gen_bool(0.5) {
                        rng.gen_range(0..2 * w / (k * k) as u32)
                    } else {
                        rng.gen_range(0..w)
                    };
                    if live.contains(&c) {
                        continue;
                    }
                    comp.add_position(&ctx, c).unwrap();
                    live.push(c);
                } else {
                    let c = live.swap_remove(rng.gen_range(0..live.len()));
                    comp.remove_position(&ctx, c).unwrap();
                }
                live.sort_unstable();
                comp.audit().unwrap();
                for _ in 0..4 {
                    let limbs: Vec<u64> = (0..w / 64).map(|_| rng.gen()).collect();
                    let x = Word::from_limbs(w, &limbs);
                    let got = comp.compress(&ctx, &x);
                    assert_eq!(got.low_u64(), extract(&x, &live));
                    assert!(got.raw_msb().is_none_or(|b| (b as usize) < live.len()));
                }
            }
        }
    }

    #[test]
    fn op_budgets() {
        let (ctx, mut comp) = build(65536, 16, &[3, 4, 5, 9000, 9001, 65535]);
        let x = Word::ones(65536);
        ctx.reset_ops();
        comp.compress(&ctx, &x);
        assert!(ctx.ops() <= 16, "compress used {}", ctx.ops());
        ctx.reset_ops();
        comp.pack(&ctx, &x);
        assert!(ctx.ops() <= 16);
        let mut worst = 0;
        for c in [6, 7, 8, 9002, 1, 2] {
            ctx.reset_ops();
            comp.add_position(&ctx, c).unwrap();
            worst = worst.max(ctx.ops());
            ctx.reset_ops();
            comp.remove_position(&ctx, c).unwrap();
            worst = worst.max(ctx.ops());
            comp.add_position(&ctx, c).unwrap();
        }
        assert!(worst <= 64, "update used {worst}");
    }

    #[test]
    fn dump_lists_positions_and_shifts() {
        let (_, comp) = build(256, 4, &[6, 1, 3]);
        let text = comp.to_string();
        assert!(text.contains("positions: 1 3 6"), "{text}");
        assert!(text.contains("shifts: 0:"), "{text}");
    }
}
