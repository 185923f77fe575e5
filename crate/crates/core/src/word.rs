//! Fixed-width simulated machine words.
//!
//! A [`Word`] is a `W`-bit unsigned integer with wrapping arithmetic, where
//! `W` is a power of two between 64 and 2^20. All counted operations go
//! through a [`WordContext`], which owns the width and an operation counter
//! used to check word-operation budgets of the higher layers.
//!
//! Internally a word stores only the window of limbs between its lowest and
//! highest nonzero limb, so sparse values (masks with a few bits near the
//! top, small keys) stay cheap even when `W` is large.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub const MIN_WIDTH: u32 = 64;
pub const MAX_WIDTH: u32 = 1 << 20;

type Limbs = SmallVec<[u64; 2]>;

/// A `W`-bit unsigned value.
///
/// Equality and hashing are structural and include the width.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    width: u32,
    /// Index of the limb stored in `limbs[0]`.
    offset: u32,
    /// Nonzero window: first and last limb are nonzero, or the vec is empty.
    limbs: Limbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitOp {
    And,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDir {
    Left,
    Right,
}

fn check_width(width: u32) -> Result<()> {
    if !width.is_power_of_two() || !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
        return Err(Error::InvalidConfig(format!(
            "word width {width} must be a power of two in [{MIN_WIDTH}, {MAX_WIDTH}]"
        )));
    }
    Ok(())
}

impl Word {
    pub fn zero(width: u32) -> Word {
        Word {
            width,
            offset: 0,
            limbs: Limbs::new(),
        }
    }

    pub fn from_u64(width: u32, value: u64) -> Word {
        let mut w = Word::zero(width);
        if value != 0 {
            w.limbs.push(value);
        }
        w
    }

    /// Builds a word from little-endian limbs, discarding bits at or above `width`.
    pub fn from_limbs(width: u32, limbs: &[u64]) -> Word {
        let n = (width / 64) as usize;
        let take = limbs.len().min(n);
        let mut w = Word {
            width,
            offset: 0,
            limbs: limbs[..take].iter().copied().collect(),
        };
        w.normalize();
        w
    }

    /// The word with only bit `t` set (zero when `t >= width`).
    pub fn bit(width: u32, t: u32) -> Word {
        if t >= width {
            return Word::zero(width);
        }
        let mut w = Word::zero(width);
        w.offset = t / 64;
        w.limbs.push(1u64 << (t % 64));
        w
    }

    /// Bits `lo..hi` set, everything else clear. `hi` is clamped to the width.
    pub fn range_mask(width: u32, lo: u32, hi: u32) -> Word {
        let hi = hi.min(width);
        if lo >= hi {
            return Word::zero(width);
        }
        let first = lo / 64;
        let last = (hi - 1) / 64;
        let mut limbs: Limbs = SmallVec::from_elem(!0u64, (last - first + 1) as usize);
        limbs[0] &= !0u64 << (lo % 64);
        let top = hi % 64;
        if top != 0 {
            let l = limbs.len() - 1;
            limbs[l] &= (1u64 << top) - 1;
        }
        let mut w = Word {
            width,
            offset: first,
            limbs,
        };
        w.normalize();
        w
    }

    /// `(1 << n) - 1`, saturating at all ones.
    pub fn low_mask(width: u32, n: u32) -> Word {
        Word::range_mask(width, 0, n)
    }

    pub fn ones(width: u32) -> Word {
        Word::range_mask(width, 0, width)
    }

    /// A word with exactly the listed bits set; positions at or above the width are ignored.
    pub fn from_bit_positions<I: IntoIterator<Item = u32>>(width: u32, bits: I) -> Word {
        let mut dense = vec![0u64; (width / 64) as usize];
        for t in bits {
            if t < width {
                dense[(t / 64) as usize] |= 1u64 << (t % 64);
            }
        }
        Word::from_limbs(width, &dense)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Limb `i` of the full `W/64`-limb representation.
    pub fn limb(&self, i: u32) -> u64 {
        if i >= self.offset && i < self.end() {
            self.limbs[(i - self.offset) as usize]
        } else {
            0
        }
    }

    /// Bits `lo..lo + n` as an integer, `n <= 64` (not counted).
    pub fn extract(&self, lo: u32, n: u32) -> u64 {
        debug_assert!(n <= 64);
        if n == 0 {
            return 0;
        }
        let (i, s) = (lo / 64, lo % 64);
        let mut v = self.limb(i) >> s;
        if s > 0 {
            v |= self.limb(i + 1) << (64 - s);
        }
        if n < 64 {
            v &= (1 << n) - 1;
        }
        v
    }

    /// Set bits in `lo..hi` (not counted).
    pub fn popcount_in(&self, lo: u32, hi: u32) -> u32 {
        let hi = hi.min(self.width);
        let mut count = 0;
        let mut at = lo;
        while at < hi {
            let n = (hi - at).min(64);
            count += self.extract(at, n).count_ones();
            at += n;
        }
        count
    }

    /// Lowest set bit in `lo..hi`, relative to `lo` (not counted).
    pub fn lsb_in(&self, lo: u32, hi: u32) -> Option<u32> {
        let mut at = lo;
        while at < hi {
            let n = (hi - at).min(64);
            let v = self.extract(at, n);
            if v != 0 {
                return Some(at - lo + v.trailing_zeros());
            }
            at += n;
        }
        None
    }

    /// All `W/64` limbs, least significant first.
    pub fn to_limbs(&self) -> Vec<u64> {
        (0..self.n_limbs()).map(|i| self.limb(i)).collect()
    }

    pub fn to_u64(&self) -> Option<u64> {
        if self.end() <= 1 {
            Some(self.limb(0))
        } else {
            None
        }
    }

    pub fn low_u64(&self) -> u64 {
        self.limb(0)
    }

    pub fn bit_is_set(&self, t: u32) -> bool {
        t < self.width && (self.limb(t / 64) >> (t % 64)) & 1 == 1
    }

    /// Indices of set bits, ascending.
    pub fn set_bits(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (j, &l) in self.limbs.iter().enumerate() {
            let mut l = l;
            while l != 0 {
                let tz = l.trailing_zeros();
                out.push((self.offset + j as u32) * 64 + tz);
                l &= l - 1;
            }
        }
        out
    }

    /// Canonical lowercase hex: `0x` followed by digits without leading zeros.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0x0".to_string();
        }
        let mut s = String::from("0x");
        let top = self.end() - 1;
        s.push_str(&format!("{:x}", self.limb(top)));
        for i in (0..top).rev() {
            s.push_str(&format!("{:016x}", self.limb(i)));
        }
        s
    }

    /// Parses `0x`-prefixed hex. Values that do not fit in `width` bits are rejected.
    pub fn from_hex(s: &str, width: u32) -> Result<Word> {
        check_width(width)?;
        let digits = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .ok_or_else(|| Error::Parse(format!("hex literal {s:?} lacks 0x prefix")))?;
        if digits.is_empty() {
            return Err(Error::Parse(format!("hex literal {s:?} has no digits")));
        }
        let digits = digits.trim_start_matches('0');
        let bits = digits.len() as u64 * 4;
        let mut dense = vec![0u64; bits.div_ceil(64) as usize];
        for (pos, c) in digits.chars().rev().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?} in {s:?}")))?;
            dense[pos / 16] |= (v as u64) << (4 * (pos % 16));
        }
        let w = Word::from_limbs(width, &dense);
        let fits = match dense.iter().rposition(|&l| l != 0) {
            None => true,
            Some(i) => (i as u64 * 64 + 64 - dense[i].leading_zeros() as u64) <= width as u64,
        };
        if !fits {
            return Err(Error::Parse(format!(
                "value {s} does not fit in {width} bits"
            )));
        }
        Ok(w)
    }

    fn n_limbs(&self) -> u32 {
        self.width / 64
    }

    fn end(&self) -> u32 {
        self.offset + self.limbs.len() as u32
    }

    fn normalize(&mut self) {
        let lead = self.limbs.iter().take_while(|&&l| l == 0).count();
        if lead == self.limbs.len() {
            self.limbs.clear();
            self.offset = 0;
            return;
        }
        if lead > 0 {
            self.limbs.drain(..lead);
            self.offset += lead as u32;
        }
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    fn from_window(width: u32, offset: u32, limbs: Limbs) -> Word {
        let mut w = Word {
            width,
            offset,
            limbs,
        };
        w.normalize();
        w
    }

    // Uncounted primitives. Counted versions live on `WordContext`; these
    // are used to build constants and by the counted wrappers.

    pub(crate) fn raw_and(&self, o: &Word) -> Word {
        let lo = self.offset.max(o.offset);
        let hi = self.end().min(o.end());
        if lo >= hi {
            return Word::zero(self.width);
        }
        let limbs = (lo..hi).map(|i| self.limb(i) & o.limb(i)).collect();
        Word::from_window(self.width, lo, limbs)
    }

    fn union_window(&self, o: &Word) -> Option<(u32, u32)> {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => None,
            (true, false) => Some((o.offset, o.end())),
            (false, true) => Some((self.offset, self.end())),
            (false, false) => Some((self.offset.min(o.offset), self.end().max(o.end()))),
        }
    }

    pub(crate) fn raw_or(&self, o: &Word) -> Word {
        match self.union_window(o) {
            None => Word::zero(self.width),
            Some((lo, hi)) => {
                let limbs = (lo..hi).map(|i| self.limb(i) | o.limb(i)).collect();
                Word::from_window(self.width, lo, limbs)
            }
        }
    }

    pub(crate) fn raw_xor(&self, o: &Word) -> Word {
        match self.union_window(o) {
            None => Word::zero(self.width),
            Some((lo, hi)) => {
                let limbs = (lo..hi).map(|i| self.limb(i) ^ o.limb(i)).collect();
                Word::from_window(self.width, lo, limbs)
            }
        }
    }

    pub(crate) fn raw_not(&self) -> Word {
        let limbs = (0..self.n_limbs()).map(|i| !self.limb(i)).collect();
        Word::from_window(self.width, 0, limbs)
    }

    /// `self & !o` without materializing the complement.
    pub(crate) fn raw_and_not(&self, o: &Word) -> Word {
        if self.is_zero() {
            return Word::zero(self.width);
        }
        let limbs = (self.offset..self.end())
            .map(|i| self.limb(i) & !o.limb(i))
            .collect();
        Word::from_window(self.width, self.offset, limbs)
    }

    pub(crate) fn raw_add(&self, o: &Word) -> Word {
        let Some((lo, hi)) = self.union_window(o) else {
            return Word::zero(self.width);
        };
        let n = self.n_limbs();
        let mut limbs = Limbs::with_capacity((hi - lo + 1) as usize);
        let mut carry = 0u64;
        for i in lo..hi {
            let (s1, c1) = self.limb(i).overflowing_add(o.limb(i));
            let (s2, c2) = s1.overflowing_add(carry);
            limbs.push(s2);
            carry = (c1 as u64) + (c2 as u64);
        }
        if carry != 0 && hi < n {
            limbs.push(carry);
        }
        Word::from_window(self.width, lo, limbs)
    }

    pub(crate) fn raw_sub(&self, o: &Word) -> Word {
        if o.is_zero() {
            return self.clone();
        }
        let (lo, hi) = self.union_window(o).unwrap();
        let n = self.n_limbs();
        let mut limbs = Limbs::with_capacity((hi - lo) as usize);
        let mut borrow = 0u64;
        for i in lo..hi {
            let (d1, b1) = self.limb(i).overflowing_sub(o.limb(i));
            let (d2, b2) = d1.overflowing_sub(borrow);
            limbs.push(d2);
            borrow = (b1 as u64) + (b2 as u64);
        }
        if borrow != 0 {
            // Wrapped: everything above the window becomes ones.
            for _ in hi..n {
                limbs.push(!0u64);
            }
        }
        Word::from_window(self.width, lo, limbs)
    }

    pub(crate) fn raw_mul(&self, o: &Word) -> Word {
        if self.is_zero() || o.is_zero() {
            return Word::zero(self.width);
        }
        // Iterate over the operand with fewer nonzero limbs.
        let (a, b) = if self.limbs.iter().filter(|&&l| l != 0).count()
            <= o.limbs.iter().filter(|&&l| l != 0).count()
        {
            (self, o)
        } else {
            (o, self)
        };
        let n = self.n_limbs();
        let lo = a.offset + b.offset;
        if lo >= n {
            return Word::zero(self.width);
        }
        let hi = (a.end() + b.end()).min(n);
        let mut acc = vec![0u64; (hi - lo) as usize];
        // Wide constants are mostly zero limbs; multiply nonzero pairs only.
        let bs: Vec<(usize, u64)> = b
            .limbs
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != 0)
            .map(|(j, &l)| (j, l))
            .collect();
        let len = acc.len();
        let add_at = |acc: &mut [u64], mut p: usize, v: u64| {
            let mut carry = v;
            while carry != 0 && p < len {
                let (s, c) = acc[p].overflowing_add(carry);
                acc[p] = s;
                carry = c as u64;
                p += 1;
            }
        };
        for (ia, &al) in a.limbs.iter().enumerate() {
            if al == 0 {
                continue;
            }
            for &(j, bl) in &bs {
                let p = ia + j;
                if p >= len {
                    break;
                }
                let t = (al as u128) * (bl as u128);
                add_at(&mut acc, p, t as u64);
                add_at(&mut acc, p + 1, (t >> 64) as u64);
            }
        }
        Word::from_window(self.width, lo, Limbs::from_vec(acc))
    }

    pub(crate) fn raw_shl(&self, s: u32) -> Word {
        if self.is_zero() || s == 0 {
            return self.clone();
        }
        if s >= self.width {
            return Word::zero(self.width);
        }
        let q = s / 64;
        let r = s % 64;
        let n = self.n_limbs();
        let new_off = self.offset + q;
        if new_off >= n {
            return Word::zero(self.width);
        }
        let mut limbs = Limbs::with_capacity(self.limbs.len() + 1);
        let mut prev = 0u64;
        for &l in &self.limbs {
            limbs.push(if r == 0 { l } else { (l << r) | prev });
            prev = if r == 0 { 0 } else { l >> (64 - r) };
        }
        if prev != 0 {
            limbs.push(prev);
        }
        limbs.truncate((n - new_off) as usize);
        Word::from_window(self.width, new_off, limbs)
    }

    pub(crate) fn raw_shr(&self, s: u32) -> Word {
        if self.is_zero() || s == 0 {
            return self.clone();
        }
        if s >= self.width {
            return Word::zero(self.width);
        }
        let q = s / 64;
        let r = s % 64;
        if q >= self.end() {
            return Word::zero(self.width);
        }
        let spill = if r == 0 { 0 } else { 1 };
        let lo = self.offset.saturating_sub(q + spill);
        let hi = self.end() - q;
        let limbs = (lo..hi)
            .map(|i| {
                let cur = self.limb(i + q);
                if r == 0 {
                    cur
                } else {
                    (cur >> r) | (self.limb(i + q + 1) << (64 - r))
                }
            })
            .collect();
        Word::from_window(self.width, lo, limbs)
    }

    pub(crate) fn raw_msb(&self) -> Option<u32> {
        self.limbs
            .last()
            .map(|&l| (self.end() - 1) * 64 + 63 - l.leading_zeros())
    }

    pub(crate) fn raw_lsb(&self) -> Option<u32> {
        self.limbs
            .first()
            .map(|&l| self.offset * 64 + l.trailing_zeros())
    }

    pub(crate) fn raw_popcount(&self) -> u32 {
        self.limbs.iter().map(|l| l.count_ones()).sum()
    }

    fn raw_cmp(&self, o: &Word) -> Ordering {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.end().cmp(&o.end()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let lo = self.offset.min(o.offset);
        for i in (lo..self.end()).rev() {
            match self.limb(i).cmp(&o.limb(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Unsigned order on values; words of different widths order by width first.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.raw_cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word<{}>({})", self.width, self.to_hex())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::LowerHex for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Owner of the word width and the word-operation counter.
///
/// Every counted primitive increments the counter by exactly one. The
/// counter is atomic so a context can be shared read-only, but it is meant
/// to be driven from one thread at a time.
#[derive(Debug)]
pub struct WordContext {
    width: u32,
    ops: AtomicU64,
}

impl Clone for WordContext {
    fn clone(&self) -> Self {
        WordContext {
            width: self.width,
            ops: AtomicU64::new(self.ops()),
        }
    }
}

impl WordContext {
    pub fn new(width: u32) -> Result<WordContext> {
        check_width(width)?;
        Ok(WordContext {
            width,
            ops: AtomicU64::new(0),
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Word operations executed since construction or the last reset.
    pub fn ops(&self) -> u64 {
        self.ops.load(AtomicOrdering::Relaxed)
    }

    pub fn reset_ops(&self) {
        self.ops.store(0, AtomicOrdering::Relaxed);
    }

    /// Charges `n` operations done on small integer registers outside the
    /// simulated words (counter arithmetic, table entries).
    pub fn charge(&self, n: u64) {
        self.ops.fetch_add(n, AtomicOrdering::Relaxed);
    }

    #[inline]
    fn tick(&self) {
        self.ops.fetch_add(1, AtomicOrdering::Relaxed);
    }

    pub fn zero(&self) -> Word {
        Word::zero(self.width)
    }

    pub fn word(&self, value: u64) -> Word {
        Word::from_u64(self.width, value)
    }

    pub fn parse_hex(&self, s: &str) -> Result<Word> {
        Word::from_hex(s, self.width)
    }

    fn same(&self, a: &Word) -> Result<()> {
        if a.width != self.width {
            return Err(Error::WidthMismatch {
                left: a.width,
                right: self.width,
            });
        }
        Ok(())
    }

    fn same2(&self, a: &Word, b: &Word) -> Result<()> {
        if a.width != b.width {
            return Err(Error::WidthMismatch {
                left: a.width,
                right: b.width,
            });
        }
        self.same(a)
    }

    /// `(a op b) mod 2^W`.
    pub fn arith(&self, a: &Word, b: &Word, op: ArithOp) -> Result<Word> {
        self.same2(a, b)?;
        self.tick();
        Ok(match op {
            ArithOp::Add => a.raw_add(b),
            ArithOp::Sub => a.raw_sub(b),
            ArithOp::Mul => a.raw_mul(b),
        })
    }

    pub fn bitwise(&self, a: &Word, b: &Word, op: BitOp) -> Result<Word> {
        self.same2(a, b)?;
        self.tick();
        Ok(match op {
            BitOp::And => a.raw_and(b),
            BitOp::Or => a.raw_or(b),
            BitOp::Xor => a.raw_xor(b),
        })
    }

    pub fn negate(&self, a: &Word) -> Result<Word> {
        self.same(a)?;
        self.tick();
        Ok(a.raw_not())
    }

    /// Logical shift; `amount` may equal `W` (result zero) but not exceed it.
    pub fn shift(&self, a: &Word, amount: u64, dir: ShiftDir) -> Result<Word> {
        self.same(a)?;
        if amount > self.width as u64 {
            return Err(Error::ShiftOutOfRange {
                amount,
                width: self.width,
            });
        }
        self.tick();
        let s = amount as u32;
        Ok(match dir {
            ShiftDir::Left => a.raw_shl(s),
            ShiftDir::Right => a.raw_shr(s),
        })
    }

    /// Index of the most significant set bit, `None` for zero.
    pub fn msb(&self, a: &Word) -> Option<u32> {
        self.tick();
        a.raw_msb()
    }

    /// Index of the least significant set bit, `None` for zero.
    pub fn lsb(&self, a: &Word) -> Option<u32> {
        self.tick();
        a.raw_lsb()
    }

    pub fn popcount(&self, a: &Word) -> u32 {
        self.tick();
        a.raw_popcount()
    }

    pub fn compare(&self, a: &Word, b: &Word) -> Result<Ordering> {
        self.same2(a, b)?;
        self.tick();
        Ok(a.raw_cmp(b))
    }

    // Infallible forms for algorithm code. They panic on width mismatch or an
    // out-of-range shift, both of which are programming errors there.

    #[track_caller]
    pub fn add(&self, a: &Word, b: &Word) -> Word {
        self.arith(a, b, ArithOp::Add).expect("add")
    }

    #[track_caller]
    pub fn sub(&self, a: &Word, b: &Word) -> Word {
        self.arith(a, b, ArithOp::Sub).expect("sub")
    }

    #[track_caller]
    pub fn mul(&self, a: &Word, b: &Word) -> Word {
        self.arith(a, b, ArithOp::Mul).expect("mul")
    }

    #[track_caller]
    pub fn and(&self, a: &Word, b: &Word) -> Word {
        self.bitwise(a, b, BitOp::And).expect("and")
    }

    /// `a & !mask` for an immediate `mask`: one op.
    #[track_caller]
    pub fn and_not(&self, a: &Word, mask: &Word) -> Word {
        self.same2(a, mask).expect("and_not");
        self.tick();
        a.raw_and_not(mask)
    }

    #[track_caller]
    pub fn or(&self, a: &Word, b: &Word) -> Word {
        self.bitwise(a, b, BitOp::Or).expect("or")
    }

    #[track_caller]
    pub fn xor(&self, a: &Word, b: &Word) -> Word {
        self.bitwise(a, b, BitOp::Xor).expect("xor")
    }

    #[track_caller]
    pub fn not(&self, a: &Word) -> Word {
        self.negate(a).expect("not")
    }

    #[track_caller]
    pub fn shl(&self, a: &Word, s: u32) -> Word {
        self.shift(a, s as u64, ShiftDir::Left).expect("shl")
    }

    #[track_caller]
    pub fn shr(&self, a: &Word, s: u32) -> Word {
        self.shift(a, s as u64, ShiftDir::Right).expect("shr")
    }

    #[track_caller]
    pub fn cmp(&self, a: &Word, b: &Word) -> Ordering {
        self.compare(a, b).expect("compare")
    }
}
