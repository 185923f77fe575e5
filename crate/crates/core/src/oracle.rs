//! A plain sorted array with the same interface as the tree: the reference
//! every differential test compares against.

use crate::error::{Error, Result};
use crate::word::Word;
use crate::OrderedSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSet {
    width: u32,
    keys: Vec<Word>,
}

impl OracleSet {
    pub fn new(width: u32) -> OracleSet {
        OracleSet {
            width,
            keys: Vec::new(),
        }
    }

    pub fn keys(&self) -> &[Word] {
        &self.keys
    }

    /// Adds many keys with one sort instead of one shift per key.
    pub fn extend_keys<I: IntoIterator<Item = Word>>(&mut self, keys: I) -> Result<()> {
        for x in keys {
            self.check(&x)?;
            self.keys.push(x);
        }
        self.keys.sort_unstable();
        self.keys.dedup();
        Ok(())
    }

    fn check(&self, x: &Word) -> Result<()> {
        if x.width() != self.width {
            return Err(Error::WidthMismatch {
                left: x.width(),
                right: self.width,
            });
        }
        Ok(())
    }
}

impl OrderedSet for OracleSet {
    fn width(&self) -> u32 {
        self.width
    }

    fn len(&self) -> u64 {
        self.keys.len() as u64
    }

    fn insert(&mut self, x: &Word) -> Result<bool> {
        self.check(x)?;
        match self.keys.binary_search(x) {
            Ok(_) => Ok(false),
            Err(p) => {
                self.keys.insert(p, x.clone());
                Ok(true)
            }
        }
    }

    fn delete(&mut self, x: &Word) -> Result<bool> {
        self.check(x)?;
        match self.keys.binary_search(x) {
            Ok(p) => {
                self.keys.remove(p);
                Ok(true)
            }
            Err(_) => Ok(false),
        }
    }

    fn member(&self, x: &Word) -> Result<bool> {
        self.check(x)?;
        Ok(self.keys.binary_search(x).is_ok())
    }

    fn rank(&self, x: &Word) -> Result<u64> {
        self.check(x)?;
        Ok(self.keys.partition_point(|y| y < x) as u64)
    }

    fn select(&self, r: u64) -> Result<Word> {
        self.keys.get(r as usize).cloned().ok_or(Error::NoSuchRank {
            rank: r,
            len: self.len(),
        })
    }

    fn predecessor(&self, x: &Word) -> Result<Option<Word>> {
        let r = self.rank(x)? as usize;
        Ok(r.checked_sub(1).map(|i| self.keys[i].clone()))
    }

    fn successor(&self, x: &Word) -> Result<Option<Word>> {
        let r = self.rank(x)? as usize;
        Ok(self.keys.get(r).cloned())
    }
}
