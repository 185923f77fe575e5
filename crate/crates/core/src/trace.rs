//! A line-oriented text format for sequences of set operations.
//!
//! ```text
//! # comment
//! ins 0x91
//! rank 0xc0
//! sel 2
//! ```
//!
//! Keys are `0x` hex; the argument of `sel` is a decimal rank. Replaying a
//! trace prints one line per query: `mem` gives `0` or `1`, `rank` a decimal
//! count, and `pred`, `succ` and `sel` a hex key or `none`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::word::Word;
use crate::OrderedSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Ins(Word),
    Del(Word),
    Mem(Word),
    Pred(Word),
    Succ(Word),
    Rank(Word),
    Sel(u64),
}

/// Operation classes, used to group statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Ins,
    Del,
    Mem,
    Pred,
    Succ,
    Rank,
    Sel,
}

impl OpKind {
    pub const ALL: [OpKind; 7] = [
        OpKind::Ins,
        OpKind::Del,
        OpKind::Mem,
        OpKind::Pred,
        OpKind::Succ,
        OpKind::Rank,
        OpKind::Sel,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            OpKind::Ins => "ins",
            OpKind::Del => "del",
            OpKind::Mem => "mem",
            OpKind::Pred => "pred",
            OpKind::Succ => "succ",
            OpKind::Rank => "rank",
            OpKind::Sel => "sel",
        }
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<OpKind> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.mnemonic() == s)
            .ok_or_else(|| Error::Parse(format!("unknown op {s:?}")))
    }
}

impl Op {
    pub fn kind(&self) -> OpKind {
        match self {
            Op::Ins(_) => OpKind::Ins,
            Op::Del(_) => OpKind::Del,
            Op::Mem(_) => OpKind::Mem,
            Op::Pred(_) => OpKind::Pred,
            Op::Succ(_) => OpKind::Succ,
            Op::Rank(_) => OpKind::Rank,
            Op::Sel(_) => OpKind::Sel,
        }
    }

    /// Parses one record such as `ins 0x1f`.
    pub fn parse(line: &str, width: u32) -> Result<Op> {
        let mut it = line.split_whitespace();
        let (Some(op), Some(arg), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!("expected `<op> <arg>`, got {line:?}")));
        };
        let kind: OpKind = op.parse()?;
        if kind == OpKind::Sel {
            let r = arg
                .parse()
                .map_err(|_| Error::Parse(format!("bad rank {arg:?}")))?;
            return Ok(Op::Sel(r));
        }
        let x = Word::from_hex(arg, width)?;
        Ok(match kind {
            OpKind::Ins => Op::Ins(x),
            OpKind::Del => Op::Del(x),
            OpKind::Mem => Op::Mem(x),
            OpKind::Pred => Op::Pred(x),
            OpKind::Succ => Op::Succ(x),
            OpKind::Rank => Op::Rank(x),
            OpKind::Sel => unreachable!(),
        })
    }

    /// Applies the op. Updates return whether the set changed; queries
    /// return their printed answer.
    pub fn apply<S: OrderedSet + ?Sized>(&self, set: &mut S) -> Result<Outcome> {
        let key = |w: Option<Word>| w.map_or_else(|| "none".to_string(), |w| w.to_hex());
        Ok(match self {
            Op::Ins(x) => Outcome::Changed(set.insert(x)?),
            Op::Del(x) => Outcome::Changed(set.delete(x)?),
            Op::Mem(x) => Outcome::Answer(if set.member(x)? { "1" } else { "0" }.into()),
            Op::Pred(x) => Outcome::Answer(key(set.predecessor(x)?)),
            Op::Succ(x) => Outcome::Answer(key(set.successor(x)?)),
            Op::Rank(x) => Outcome::Answer(set.rank(x)?.to_string()),
            Op::Sel(r) if *r < set.len() => Outcome::Answer(set.select(*r)?.to_hex()),
            Op::Sel(_) => Outcome::Answer("none".into()),
        })
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.kind().mnemonic();
        match self {
            Op::Ins(x) | Op::Del(x) | Op::Mem(x) | Op::Pred(x) | Op::Succ(x) | Op::Rank(x) => {
                write!(f, "{kind} {x}")
            }
            Op::Sel(r) => write!(f, "{kind} {r}"),
        }
    }
}

/// The effect of one op.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Changed(bool),
    Answer(String),
}

impl Outcome {
    /// The output line, for queries.
    pub fn line(&self) -> Option<&str> {
        match self {
            Outcome::Changed(_) => None,
            Outcome::Answer(s) => Some(s),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Changed(true) => f.write_str("changed"),
            Outcome::Changed(false) => f.write_str("unchanged"),
            Outcome::Answer(s) => f.write_str(s),
        }
    }
}

/// A parsed trace. Records keep their source line for error reports.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpTrace {
    records: Vec<(usize, Op)>,
}

impl OpTrace {
    pub fn new() -> OpTrace {
        OpTrace::default()
    }

    pub fn from_ops<I: IntoIterator<Item = Op>>(ops: I) -> OpTrace {
        OpTrace {
            records: ops.into_iter().enumerate().map(|(i, op)| (i + 1, op)).collect(),
        }
    }

    /// Parses `text`, rejecting keys wider than `width`.
    pub fn parse(text: &str, width: u32) -> Result<OpTrace> {
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let op = Op::parse(line, width).map_err(|e| Error::Trace {
                line: i + 1,
                msg: match e {
                    Error::Parse(m) => m,
                    other => other.to_string(),
                },
            })?;
            records.push((i + 1, op));
        }
        Ok(OpTrace { records })
    }

    pub fn push(&mut self, op: Op) {
        let line = self.records.last().map_or(1, |r| r.0 + 1);
        self.records.push((line, op));
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = &Op> {
        self.records.iter().map(|r| &r.1)
    }

    /// `(source line, op)` pairs.
    pub fn records(&self) -> &[(usize, Op)] {
        &self.records
    }

    /// Replays the trace on `set` and collects the query answers.
    pub fn replay<S: OrderedSet + ?Sized>(&self, set: &mut S) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (line, op) in &self.records {
            let outcome = op.apply(set).map_err(|e| Error::Trace {
                line: *line,
                msg: e.to_string(),
            })?;
            out.extend(outcome.line().map(str::to_string));
        }
        Ok(out)
    }

    /// Replays on two sets in lockstep and stops at the first op where they
    /// disagree (including on whether an update changed the set).
    pub fn replay_both<A, B>(&self, a: &mut A, b: &mut B) -> std::result::Result<Vec<String>, Divergence>
    where
        A: OrderedSet + ?Sized,
        B: OrderedSet + ?Sized,
    {
        let mut out = Vec::new();
        for (index, (line, op)) in self.records.iter().enumerate() {
            let left = op.apply(a).map_err(|e| e.to_string());
            let right = op.apply(b).map_err(|e| e.to_string());
            if left != right {
                return Err(Divergence {
                    index,
                    line: *line,
                    op: op.clone(),
                    left: show(&left),
                    right: show(&right),
                });
            }
            if let Ok(outcome) = left {
                out.extend(outcome.line().map(str::to_string));
            }
        }
        Ok(out)
    }
}

fn show(r: &std::result::Result<Outcome, String>) -> String {
    match r {
        Ok(o) => o.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

impl fmt::Display for OpTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (_, op) in &self.records {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Two implementations disagreed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// Position of the op in the trace.
    pub index: usize,
    /// Source line of the op.
    pub line: usize,
    pub op: Op,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}: `{}` gave {} vs {}",
            self.line, self.op, self.left, self.right
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::OracleSet;

    #[test]
    fn parse_skips_comments_and_keeps_lines() {
        let t = OpTrace::parse("# header\nins 0x5\n\n  pred 0x5\nsel 0\n", 64).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.records()[1], (4, Op::Pred(Word::from_u64(64, 5))));
        assert_eq!(t.to_string(), "ins 0x5\npred 0x5\nsel 0\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = OpTrace::parse("ins 0x1\nfoo 0x2\n", 64).unwrap_err();
        assert!(matches!(e, Error::Trace { line: 2, .. }), "{e}");
        let e = OpTrace::parse("ins 0x1\n\nins 0x1ffffffffffffffff\n", 64).unwrap_err();
        assert!(matches!(e, Error::Trace { line: 3, .. }), "{e}");
        assert!(OpTrace::parse("sel 0x3", 64).is_err());
        assert!(OpTrace::parse("ins", 64).is_err());
        assert!(OpTrace::parse("ins 5", 64).is_err());
    }

    #[test]
    fn replay_prints_queries_only() {
        let t = OpTrace::parse(
            "ins 0x5\npred 0x5\nsucc 0x5\nmem 0x5\nmem 0x6\nrank 0x6\nsel 0\nsel 1\ndel 0x5\n",
            64,
        )
        .unwrap();
        let mut s = OracleSet::new(64);
        assert_eq!(
            t.replay(&mut s).unwrap(),
            ["none", "0x5", "1", "0", "1", "0x5", "none"]
        );
        assert!(s.is_empty());
        assert!(OpTrace::new().replay(&mut s).unwrap().is_empty());
    }

    #[test]
    fn replay_both_reports_the_first_disagreement() {
        let t = OpTrace::parse("ins 0x1\nins 0x2\nrank 0x3\n", 64).unwrap();
        let mut a = OracleSet::new(64);
        let mut b = OracleSet::new(64);
        b.insert(&Word::from_u64(64, 2)).unwrap();
        let d = t.replay_both(&mut a, &mut b).unwrap_err();
        assert_eq!((d.index, d.line), (1, 2));
        assert_eq!((d.left.as_str(), d.right.as_str()), ("changed", "unchanged"));
    }
}
