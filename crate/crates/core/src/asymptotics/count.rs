//! Exact enumeration of the circuits `Π(ω)` matching a word.

use rayon::prelude::*;
use serde::Serialize;

use crate::combin::Word;
use crate::error::{Error, Result};
use crate::patterns::LinkPattern;

/// Default cap on the number of free-vertex assignments explored.
pub const DEFAULT_WORK_BUDGET: u128 = 256u128.pow(4);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiCountResult {
    pub word: String,
    pub pattern: LinkPattern,
    pub n: usize,
    pub count: u64,
    /// `count / n^{b+1}` with `b` distinct letters.
    pub normalized: f64,
}

struct Search<'a> {
    pattern: LinkPattern,
    n: usize,
    letters: &'a [u8],
}

impl Search<'_> {
    /// Counts completions given `pi[0..=i-1]` fixed and `values` holding the
    /// link value of every letter seen so far (`usize::MAX` when unseen).
    fn extend(&self, i: usize, pi: &mut [usize], values: &mut [usize]) -> u64 {
        let k = self.letters.len();
        let prev = pi[i - 1];
        let letter = self.letters[i - 1] as usize;
        let fresh = values[letter] == usize::MAX;
        if i == k {
            let t = self.pattern.link(self.n, prev, pi[0]);
            let ok = if fresh {
                !values.contains(&t)
            } else {
                values[letter] == t
            };
            return ok as u64;
        }
        let mut total = 0;
        if fresh {
            for c in 1..=self.n {
                let t = self.pattern.link(self.n, prev, c);
                if values.contains(&t) {
                    continue;
                }
                values[letter] = t;
                pi[i] = c;
                total += self.extend(i + 1, pi, values);
                values[letter] = usize::MAX;
            }
        } else {
            let pre = self.pattern.preimages(self.n, prev, values[letter]);
            for &c in pre.as_slice() {
                pi[i] = c;
                total += self.extend(i + 1, pi, values);
            }
        }
        total
    }

    fn count_from(&self, start: usize) -> u64 {
        let k = self.letters.len();
        let b = self
            .letters
            .iter()
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0);
        let mut pi = vec![0; k + 1];
        let mut values = vec![usize::MAX; b];
        pi[0] = start;
        self.extend(1, &mut pi, &mut values)
    }
}

/// `|Π(ω)|` at dimension `n`: circuits `π(0..k)` with values in `[1, n]`,
/// `π(0) = π(k)`, whose edges share a link value exactly when they share a
/// letter.
pub fn count_pi_exact(w: &Word, pattern: LinkPattern, n: usize) -> Result<PiCountResult> {
    count_pi_exact_with_budget(w, pattern, n, DEFAULT_WORK_BUDGET)
}

pub fn count_pi_exact_with_budget(
    w: &Word,
    pattern: LinkPattern,
    n: usize,
    budget: u128,
) -> Result<PiCountResult> {
    if n < 1 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    if w.is_empty() {
        return Err(Error::Argument("empty word".into()));
    }
    let b = w.distinct_letters();
    // Both circulant patterns are invariant under π ↦ π + s (mod n), so only
    // π(0) = 1 needs to be explored.
    let shift_invariant = matches!(
        pattern,
        LinkPattern::ReverseCirculant | LinkPattern::SymmetricCirculant
    );
    let free = if shift_invariant { b } else { b + 1 };
    let work = (n as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
    if work > budget {
        return Err(Error::capacity(
            format!("circuit enumeration for '{w}' at n = {n}"),
            work,
            budget,
        ));
    }
    let search = Search {
        pattern,
        n,
        letters: w.letters(),
    };
    let count = if shift_invariant {
        search.count_from(1) * n as u64
    } else {
        (1..=n).into_par_iter().map(|s| search.count_from(s)).sum()
    };
    Ok(PiCountResult {
        word: w.to_string(),
        pattern,
        n,
        count,
        normalized: count as f64 / (n as f64).powi(b as i32 + 1),
    })
}

/// Two-point Richardson extrapolation in `1/n`, removing the leading `c/n`
/// term.
pub fn richardson(n1: usize, f1: f64, n2: usize, f2: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    (b * f2 - a * f1) / (b - a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub raw: Vec<PiCountResult>,
    pub limit: f64,
    /// Distance between the extrapolated value and the larger-n raw value.
    pub fit_error: f64,
}

pub fn extrapolate_normalized(
    w: &Word,
    pattern: LinkPattern,
    n1: usize,
    n2: usize,
) -> Result<Extrapolation> {
    if n1 >= n2 {
        return Err(Error::Argument(format!("need n1 < n2, got {n1} and {n2}")));
    }
    let r1 = count_pi_exact(w, pattern, n1)?;
    let r2 = count_pi_exact(w, pattern, n2)?;
    let limit = richardson(n1, r1.normalized, n2, r2.normalized);
    let fit_error = (limit - r2.normalized).abs();
    Ok(Extrapolation {
        raw: vec![r1, r2],
        limit,
        fit_error,
    })
}
