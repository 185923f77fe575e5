//! Word-level parallel primitives: fields, repeated patterns, bit-matrix
//! masks and the packed parallel rank.
//!
//! Field `i` of width `f` in `x` is bits `i*f .. (i+1)*f`, counted from the
//! least significant end. A 2-D index `(i, j)` with row width `g` is field
//! `i*g + j`.
//!
//! Masks that depend only on field geometry and host integers are treated as
//! immediates: building them is not counted as word operations. Every
//! operation that touches a data word is counted through the
//! [`WordContext`].

use crate::error::{Error, Result};
use crate::word::{Word, WordContext};

fn check_fields(width: u32, end_field: u64, f: u32) -> Result<()> {
    if f == 0 || f > width {
        return Err(Error::FieldOutOfRange(format!(
            "field width {f} not in [1, {width}]"
        )));
    }
    if end_field * f as u64 > width as u64 {
        return Err(Error::FieldOutOfRange(format!(
            "fields up to {end_field} of width {f} exceed {width} bits"
        )));
    }
    Ok(())
}

/// `x<i>_f`, zero-extended.
pub fn field_get(ctx: &WordContext, x: &Word, i: usize, f: u32) -> Result<Word> {
    check_fields(ctx.width(), i as u64 + 1, f)?;
    let shifted = ctx.shr(x, i as u32 * f);
    Ok(ctx.and(&shifted, &Word::low_mask(ctx.width(), f)))
}

/// `x` with field `i` replaced by the low `f` bits of `y`.
pub fn field_set(ctx: &WordContext, x: &Word, i: usize, f: u32, y: &Word) -> Result<Word> {
    check_fields(ctx.width(), i as u64 + 1, f)?;
    let lo = i as u32 * f;
    Ok(splice_bits(ctx, x, lo, lo + f, y))
}

/// Fields `i..j` of `x`, right-aligned. `j = None` means all remaining fields.
pub fn range_get(ctx: &WordContext, x: &Word, i: usize, j: Option<usize>, f: u32) -> Result<Word> {
    check_range(ctx.width(), i, j, f)?;
    let shifted = ctx.shr(x, i as u32 * f);
    match j {
        None => Ok(shifted),
        Some(j) => Ok(ctx.and(&shifted, &Word::low_mask(ctx.width(), (j - i) as u32 * f))),
    }
}

/// Writes the low `(j - i) * f` bits of `y` into fields `i..j` of `x`.
pub fn range_set(
    ctx: &WordContext,
    x: &Word,
    i: usize,
    j: Option<usize>,
    f: u32,
    y: &Word,
) -> Result<Word> {
    check_range(ctx.width(), i, j, f)?;
    let lo = i as u32 * f;
    let hi = match j {
        None => ctx.width(),
        Some(j) => j as u32 * f,
    };
    Ok(splice_bits(ctx, x, lo, hi, y))
}

fn check_range(width: u32, i: usize, j: Option<usize>, f: u32) -> Result<()> {
    let end = j.unwrap_or(i);
    if end < i {
        return Err(Error::FieldOutOfRange(format!("inverted range {i}..{end}")));
    }
    check_fields(width, end.max(i) as u64, f)?;
    if j.is_none() && i as u64 * f as u64 > width as u64 {
        return Err(Error::FieldOutOfRange(format!(
            "range start {i} of width {f} beyond {width} bits"
        )));
    }
    Ok(())
}

/// Replace bits `lo..hi` of `x` by the low bits of `y`: 4 word operations.
pub(crate) fn splice_bits(ctx: &WordContext, x: &Word, lo: u32, hi: u32, y: &Word) -> Word {
    let w = ctx.width();
    let m = Word::range_mask(w, lo, hi);
    let keep = ctx.and_not(x, &m);
    let moved = ctx.shl(y, lo);
    let moved = ctx.and(&moved, &m);
    ctx.or(&keep, &moved)
}

/// Makes room for a new zero field `i` by moving fields `i..` up one place:
/// 4 word operations. The top field falls off the word.
pub(crate) fn open_field(ctx: &WordContext, x: &Word, i: usize, f: u32) -> Word {
    let low = Word::low_mask(ctx.width(), i as u32 * f);
    let lo = ctx.and(x, &low);
    let hi = ctx.and_not(x, &low);
    let hi = ctx.shl(&hi, f);
    ctx.or(&lo, &hi)
}

/// Removes field `i`, moving fields `i+1..` down one place: 4 word operations.
pub(crate) fn close_field(ctx: &WordContext, x: &Word, i: usize, f: u32) -> Word {
    let low = Word::low_mask(ctx.width(), i as u32 * f);
    let lo = ctx.and(x, &low);
    let hi = ctx.shr(x, f);
    let hi = ctx.and_not(&hi, &low);
    ctx.or(&lo, &hi)
}

/// `(0^{f-1}1)^m`: a one in the low bit of each of `m` fields of width `f`.
pub fn unit_pattern(width: u32, f: u32, m: usize) -> Word {
    Word::from_bit_positions(width, (0..m as u32).map(|i| i * f))
}

/// `m` copies of `y` in consecutive `f`-bit fields, by one multiplication.
pub fn repeat(ctx: &WordContext, y: &Word, f: u32, m: usize) -> Result<Word> {
    check_fields(ctx.width(), m as u64, f)?;
    if y.raw_msb().is_some_and(|b| b >= f) {
        return Err(Error::Usage(format!("repeated value {y} wider than {f} bits")));
    }
    Ok(ctx.mul(y, &unit_pattern(ctx.width(), f, m)))
}

fn check_matrix(width: u32, rows: usize, row_width: u32) -> Result<()> {
    if row_width == 0 || rows as u64 * row_width as u64 > width as u64 {
        return Err(Error::FieldOutOfRange(format!(
            "{rows}x{row_width} bit matrix does not fit in {width} bits"
        )));
    }
    Ok(())
}

/// `M_h`: bit `h` of each of the `k` rows of width `row_width`.
pub fn mask_column(width: u32, h: u32, k: usize, row_width: u32) -> Result<Word> {
    check_matrix(width, k, row_width)?;
    if h >= row_width {
        return Err(Error::FieldOutOfRange(format!(
            "column {h} outside row width {row_width}"
        )));
    }
    Ok(Word::from_bit_positions(
        width,
        (0..k as u32).map(|r| r * row_width + h),
    ))
}

/// `M_{i:j}`: columns `i..=j` of every row.
pub fn mask_columns(width: u32, i: u32, j: u32, k: usize, row_width: u32) -> Result<Word> {
    check_matrix(width, k, row_width)?;
    if i > j || j >= row_width {
        return Err(Error::FieldOutOfRange(format!(
            "column range {i}..={j} invalid for row width {row_width}"
        )));
    }
    Ok(column_span(width, i, j + 1, k, row_width))
}

/// Columns `lo..hi` of rows `0..k`.
pub(crate) fn column_span(width: u32, lo: u32, hi: u32, k: usize, row_width: u32) -> Word {
    let row = Word::range_mask(width, lo, hi);
    row.raw_mul(&unit_pattern(width, row_width, k))
}

/// `M^{i0:i1}`: rows `i0..=i1` fully set.
pub fn mask_rows(width: u32, i0: usize, i1: usize, row_width: u32) -> Result<Word> {
    check_matrix(width, i1 + 1, row_width)?;
    if i0 > i1 {
        return Err(Error::FieldOutOfRange(format!("inverted row range {i0}..={i1}")));
    }
    Ok(row_span(width, i0, i1 + 1, row_width))
}

/// Rows `lo..hi` fully set.
pub(crate) fn row_span(width: u32, lo: usize, hi: usize, row_width: u32) -> Word {
    Word::range_mask(width, lo as u32 * row_width, hi as u32 * row_width)
}

/// Number of fields of `a` strictly below `x`.
///
/// Preconditions (not checked beyond what is cheap): the `m` fields of width
/// `f` are sorted ascending with their top bit clear, and
/// `x < 2^(f-1)`. Costs five word operations for `m > 0`.
pub fn packed_rank(ctx: &WordContext, x: &Word, a: &Word, m: usize, f: u32) -> Result<usize> {
    check_fields(ctx.width(), m as u64, f)?;
    if f < 2 {
        return Err(Error::FieldOutOfRange("packed rank needs f >= 2".into()));
    }
    if x.raw_msb().is_some_and(|b| b >= f - 1) {
        return Err(Error::Usage(format!("rank query {x} needs a free sentinel bit")));
    }
    if m == 0 {
        return Ok(0);
    }
    let ones = unit_pattern(ctx.width(), f, m);
    let sentinels = ones.raw_shl(f - 1);
    Ok(rank_with(ctx, x, a, m, f, &ones, &sentinels))
}

/// Sentinel-bit rank: `T = (A | S) - x*ones`; a field keeps its sentinel iff
/// it is `>= x`, and sortedness makes the first survivor the rank.
fn rank_with(
    ctx: &WordContext,
    x: &Word,
    a: &Word,
    m: usize,
    f: u32,
    ones: &Word,
    sentinels: &Word,
) -> usize {
    let xs = ctx.mul(x, ones);
    rank_repeated(ctx, &xs, a, m, f, sentinels)
}

fn rank_repeated(
    ctx: &WordContext,
    xs: &Word,
    a: &Word,
    m: usize,
    f: u32,
    sentinels: &Word,
) -> usize {
    let t = ctx.or(a, sentinels);
    let t = ctx.sub(&t, xs);
    let survivors = ctx.and(&t, sentinels);
    match ctx.lsb(&survivors) {
        Some(bit) => ((bit - (f - 1)) / f) as usize,
        None => m,
    }
}

/// Precomputed constants for packed ranks over up to `capacity` fields of a
/// fixed width.
#[derive(Debug, Clone)]
pub(crate) struct PackedRanker {
    f: u32,
    /// `ones[m]`: unit pattern over `m` fields.
    ones: Vec<Word>,
    sentinels: Vec<Word>,
}

impl PackedRanker {
    pub(crate) fn new(width: u32, f: u32, capacity: usize) -> PackedRanker {
        assert!(f >= 2 && capacity as u64 * f as u64 <= width as u64);
        let ones: Vec<Word> = (0..=capacity).map(|m| unit_pattern(width, f, m)).collect();
        let sentinels = ones.iter().map(|o| o.raw_shl(f - 1)).collect();
        PackedRanker { f, ones, sentinels }
    }

    /// Unit pattern over `m` fields.
    pub(crate) fn ones(&self, m: usize) -> &Word {
        &self.ones[m]
    }

    /// Rank of `x` among the first `m` fields of `a`: five word operations.
    pub(crate) fn rank(&self, ctx: &WordContext, x: &Word, a: &Word, m: usize) -> usize {
        if m == 0 {
            return 0;
        }
        rank_with(ctx, x, a, m, self.f, &self.ones[m], &self.sentinels[m])
    }

    /// Like [`rank`](Self::rank) for a query already repeated over at least
    /// the first `m` fields (fields `>= m` of `xs` must be zero).
    pub(crate) fn rank_repeated(&self, ctx: &WordContext, xs: &Word, a: &Word, m: usize) -> usize {
        if m == 0 {
            return 0;
        }
        rank_repeated(ctx, xs, a, m, self.f, &self.sentinels[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> WordContext {
        WordContext::new(256).unwrap()
    }

    #[test]
    fn field_access() {
        let c = ctx();
        let x = c.word(0xDA);
        assert_eq!(field_get(&c, &x, 1, 4).unwrap(), c.word(0xD));
        assert_eq!(field_get(&c, &x, 0, 256).unwrap(), x);
        assert_eq!(field_get(&c, &c.word(0b110100), 1, 2).unwrap(), c.word(0b01));
        assert!(field_get(&c, &x, 64, 4).is_err());
        assert!(field_get(&c, &x, 0, 0).is_err());
    }

    #[test]
    fn field_assignment() {
        let c = ctx();
        assert_eq!(field_set(&c, &c.zero(), 2, 4, &c.word(0xF)).unwrap(), c.word(0xF00));
        assert_eq!(field_set(&c, &c.word(0xFF), 0, 4, &c.zero()).unwrap(), c.word(0xF0));
        let x = c.word(0x1234);
        let y = c.word(0x1AB);
        let z = field_set(&c, &x, 1, 8, &y).unwrap();
        assert_eq!(field_get(&c, &z, 1, 8).unwrap(), c.word(0xAB));
        assert_eq!(z, c.word(0xAB34));
    }

    #[test]
    fn ranges() {
        let c = ctx();
        let x = c.word(0xABCD);
        assert_eq!(range_get(&c, &x, 1, Some(3), 4).unwrap(), c.word(0xBC));
        assert_eq!(range_get(&c, &x, 0, None, 4).unwrap(), x);
        let y = range_set(&c, &x, 1, Some(3), 4, &c.word(0x12)).unwrap();
        assert_eq!(y, c.word(0xA12D));
        assert_eq!(range_get(&c, &y, 1, Some(3), 4).unwrap(), c.word(0x12));
        assert!(range_get(&c, &x, 3, Some(1), 4).is_err());
        assert!(range_get(&c, &x, 0, Some(65), 4).is_err());
    }

    #[test]
    fn repeats() {
        let c = ctx();
        assert_eq!(repeat(&c, &c.word(1), 2, 3).unwrap(), c.word(0b010101));
        assert_eq!(repeat(&c, &c.word(0b10), 4, 4).unwrap(), c.word(0x2222));
        let y = c.word(0x5a);
        assert_eq!(repeat(&c, &y, 8, 1).unwrap(), y);
        assert!(repeat(&c, &y, 8, 33).is_err());
        assert!(repeat(&c, &c.word(0x1ff), 8, 2).is_err());
    }

    #[test]
    fn matrix_masks() {
        let w = 256;
        let m0 = mask_column(w, 0, 4, 5).unwrap();
        assert_eq!(m0.set_bits(), vec![0, 5, 10, 15]);
        assert_eq!(mask_column(w, 1, 2, 2).unwrap(), Word::from_u64(w, 0b1010));
        assert_eq!(mask_column(w, 3, 4, 5).unwrap(), m0.raw_shl(3));
        assert_eq!(mask_rows(w, 1, 1, 4).unwrap(), Word::from_u64(w, 0x0F0));
        // Full column range is the whole matrix area.
        assert_eq!(mask_columns(w, 0, 3, 4, 4).unwrap(), Word::low_mask(w, 16));
        let span = mask_columns(w, 1, 3, 4, 5).unwrap();
        let mut or = Word::zero(w);
        for h in 1..=3 {
            or = or.raw_or(&mask_column(w, h, 4, 5).unwrap());
        }
        assert_eq!(span, or);
        assert!(mask_columns(w, 3, 1, 4, 5).is_err());
        assert!(mask_rows(w, 2, 1, 4).is_err());
    }

    #[test]
    fn open_and_close_fields() {
        let c = ctx();
        let x = c.word(0x4321);
        assert_eq!(open_field(&c, &x, 1, 4), c.word(0x43201));
        assert_eq!(open_field(&c, &x, 0, 4), c.word(0x43210));
        assert_eq!(close_field(&c, &x, 1, 4), c.word(0x431));
        assert_eq!(close_field(&c, &open_field(&c, &x, 2, 4), 2, 4), x);
    }

    fn pack(c: &WordContext, fields: &[u64], f: u32) -> Word {
        let mut a = c.zero();
        for (i, &v) in fields.iter().enumerate() {
            a = a.raw_or(&Word::from_u64(c.width(), v).raw_shl(i as u32 * f));
        }
        a
    }

    #[test]
    fn packed_rank_examples() {
        let c = ctx();
        let a = pack(&c, &[0b001, 0b011, 0b101], 4);
        assert_eq!(packed_rank(&c, &c.word(0b100), &a, 3, 4).unwrap(), 2);
        assert_eq!(packed_rank(&c, &c.word(0), &a, 3, 4).unwrap(), 0);
        assert_eq!(packed_rank(&c, &c.word(0b111), &a, 3, 4).unwrap(), 3);
        assert_eq!(packed_rank(&c, &c.word(5), &c.zero(), 0, 4).unwrap(), 0);
        assert!(packed_rank(&c, &c.word(0b1000), &a, 3, 4).is_err());
    }

    #[test]
    fn packed_rank_op_budget() {
        let c = ctx();
        let a = pack(&c, &[1, 4, 9, 16, 25, 36], 7);
        c.reset_ops();
        let r = packed_rank(&c, &c.word(20), &a, 6, 7).unwrap();
        assert_eq!(r, 4);
        assert!(c.ops() <= 8, "{} ops", c.ops());
    }
}
