//! Set partitions of `[k]`, their words, and the even/symmetric classes.
//!
//! A partition is stored as its restricted growth string: `rgs[i]` is the
//! block of element `i + 1`, and blocks are numbered by first appearance.
//! That string is also the partition's canonical word, with block `0` printed
//! as `a`, block `1` as `b` and so on.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on the ground-set size. Bell(10) = 115975.
pub const KCAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rgs: Vec<u8>,
}

impl Partition {
    /// Builds a partition from its restricted growth string.
    pub fn from_rgs(rgs: Vec<u8>) -> Result<Self> {
        let mut next = 0u8;
        for &r in &rgs {
            if r > next {
                return Err(Error::Argument(format!(
                    "{rgs:?} is not a restricted growth string"
                )));
            }
            if r == next {
                next += 1;
            }
        }
        Ok(Partition { rgs })
    }

    /// Builds a partition from 1-based blocks covering `{1..k}`.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<Self> {
        let k: usize = blocks.iter().map(Vec::len).sum();
        let mut owner = vec![usize::MAX; k];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Argument("empty block".into()));
            }
            for &e in block {
                if e == 0 || e > k || owner[e - 1] != usize::MAX {
                    return Err(Error::Argument(format!(
                        "blocks do not partition {{1..{k}}}"
                    )));
                }
                owner[e - 1] = b;
            }
        }
        let mut relabel = vec![u8::MAX; blocks.len()];
        let mut next = 0u8;
        let rgs = owner
            .into_iter()
            .map(|b| {
                if relabel[b] == u8::MAX {
                    relabel[b] = next;
                    next += 1;
                }
                relabel[b]
            })
            .collect();
        Ok(Partition { rgs })
    }

    pub fn k(&self) -> usize {
        self.rgs.len()
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    pub fn block_count(&self) -> usize {
        self.rgs.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Blocks as sorted 1-based element lists, ordered by smallest element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &r) in self.rgs.iter().enumerate() {
            blocks[r as usize].push(i + 1);
        }
        blocks
    }

    /// Block sizes in block order (not sorted).
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.block_count()];
        for &r in &self.rgs {
            sizes[r as usize] += 1;
        }
        sizes
    }

    /// Block sizes as a sorted multiset.
    pub fn sorted_block_sizes(&self) -> Vec<usize> {
        let mut sizes = self.block_sizes();
        sizes.sort_unstable();
        sizes
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (bi, block) in self.blocks().iter().enumerate() {
            if bi > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (ei, e) in block.iter().enumerate() {
                if ei > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// Restricted-growth-string enumeration of all partitions of `[k]`.
#[derive(Debug, Clone)]
pub struct Partitions {
    rgs: Vec<u8>,
    // prefix_max[i] = max(rgs[..=i])
    prefix_max: Vec<u8>,
    done: bool,
}

impl Partitions {
    fn new(k: usize) -> Self {
        Partitions {
            rgs: vec![0; k],
            prefix_max: vec![0; k],
            done: k == 0,
        }
    }

    fn advance(&mut self) {
        let k = self.rgs.len();
        for i in (1..k).rev() {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..k {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = Partition {
            rgs: self.rgs.clone(),
        };
        self.advance();
        Some(out)
    }
}

/// All partitions of `[k]` in restricted-growth-string order.
pub fn enumerate_partitions(k: usize) -> Result<Partitions> {
    enumerate_partitions_capped(k, KCAP)
}

pub fn enumerate_partitions_capped(k: usize, kcap: usize) -> Result<Partitions> {
    if k == 0 {
        return Err(Error::Argument("partitions need k ≥ 1".into()));
    }
    if k > kcap {
        return Err(Error::capacity(
            format!("partitions of [{k}]"),
            bell(k),
            bell(kcap),
        ));
    }
    Ok(Partitions::new(k))
}

/// Bell number via the Bell triangle; saturates instead of overflowing.
pub fn bell(k: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &r in &row {
            let last = *next.last().unwrap();
            next.push(r.saturating_add(last));
        }
        row = next;
    }
    row[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Class {
    pub even: bool,
    pub symmetric: bool,
}

pub fn classify(p: &Partition) -> Class {
    let b = p.block_count();
    // count[block] = (#odd positions, #even positions), positions 1-based
    let mut count = vec![(0usize, 0usize); b];
    for (i, &r) in p.rgs.iter().enumerate() {
        if (i + 1) % 2 == 1 {
            count[r as usize].0 += 1;
        } else {
            count[r as usize].1 += 1;
        }
    }
    Class {
        even: count.iter().all(|&(o, e)| (o + e) % 2 == 0),
        symmetric: count.iter().all(|&(o, e)| o == e),
    }
}

/// A canonical word: the first occurrence of each letter is the smallest
/// letter not yet used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u8>,
}

/// Outcome of parsing a word that may not be canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedWord {
    pub word: Word,
    /// True when letters had to be renamed to reach canonical form.
    pub normalized: bool,
}

impl Word {
    /// Parses any string of lowercase letters, renaming letters into
    /// canonical order when needed and reporting whether that happened.
    pub fn parse(s: &str) -> Result<ParsedWord> {
        if s.is_empty() {
            return Err(Error::Argument("empty word".into()));
        }
        let mut map = [u8::MAX; 26];
        let mut next = 0u8;
        let mut letters = Vec::with_capacity(s.len());
        let mut normalized = false;
        for ch in s.chars() {
            if !ch.is_ascii_lowercase() {
                return Err(Error::Argument(format!(
                    "word '{s}' contains '{ch}'; only a-z are allowed"
                )));
            }
            let c = (ch as u8 - b'a') as usize;
            if map[c] == u8::MAX {
                map[c] = next;
                next += 1;
            }
            normalized |= map[c] as usize != c;
            letters.push(map[c]);
        }
        Ok(ParsedWord {
            word: Word { letters },
            normalized,
        })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letter indices (`0` for `a`), canonical.
    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn distinct_letters(&self) -> usize {
        self.letters.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Every letter appears at least twice.
    pub fn is_matched(&self) -> bool {
        partition_of(self).block_sizes().iter().all(|&s| s >= 2)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", (b'a' + l) as char)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Strict parse: non-canonical input is an error. Use [`Word::parse`] to
    /// normalize instead.
    fn from_str(s: &str) -> Result<Self> {
        let parsed = Word::parse(s)?;
        if parsed.normalized {
            return Err(Error::Argument(format!(
                "word '{s}' is not canonical (canonical form is '{}')",
                parsed.word
            )));
        }
        Ok(parsed.word)
    }
}

pub fn word_of(p: &Partition) -> Result<Word> {
    if p.block_count() > 26 {
        return Err(Error::Range("words are limited to 26 letters".into()));
    }
    Ok(Word {
        letters: p.rgs.clone(),
    })
}

pub fn partition_of(w: &Word) -> Partition {
    Partition {
        rgs: w.letters.clone(),
    }
}

/// `∏_blocks c_{|V|}` where `c[s - 1]` holds `c_s`.
pub fn multiplicative_extension(c: &[f64], p: &Partition) -> Result<f64> {
    let mut prod = 1.0;
    for s in p.block_sizes() {
        let v = c.get(s - 1).ok_or_else(|| {
            Error::Range(format!("c_{s} needed but only c_1..c_{} supplied", c.len()))
        })?;
        prod *= v;
    }
    Ok(prod)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Range(format!("C({n}, {k}) overflows")))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// `a_{2n} = C(2n, n) / 2`, the block weight of the symmetric circulant limit.
pub fn a_coefficient(two_n: usize) -> Result<f64> {
    if two_n < 2 || two_n % 2 == 1 {
        return Err(Error::Argument(format!(
            "a-coefficients are defined for even orders ≥ 2, got {two_n}"
        )));
    }
    let c = binomial(two_n as u64, two_n as u64 / 2)?;
    Ok(c as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub k: usize,
    pub partitions: u64,
    pub even: u64,
    pub symmetric: u64,
    /// Entry `b` counts even partitions with exactly `b` blocks.
    pub even_by_blocks: Vec<u64>,
    /// Entry `b` counts symmetric partitions with exactly `b` blocks.
    pub symmetric_by_blocks: Vec<u64>,
}

pub fn class_counts(k: usize) -> Result<ClassCounts> {
    let mut out = ClassCounts {
        k,
        partitions: 0,
        even: 0,
        symmetric: 0,
        even_by_blocks: vec![0; k + 1],
        symmetric_by_blocks: vec![0; k + 1],
    };
    for p in enumerate_partitions(k)? {
        let b = p.block_count();
        let class = classify(&p);
        out.partitions += 1;
        if class.even {
            out.even += 1;
            out.even_by_blocks[b] += 1;
        }
        if class.symmetric {
            out.symmetric += 1;
            out.symmetric_by_blocks[b] += 1;
        }
    }
    Ok(out)
}
