//! Monte Carlo evaluation of the word volumes behind the Toeplitz and
//! Hankel limits.
//!
//! Vertices are rescaled to `v_i = π(i)/n ∈ [0, 1]`. `v_0` and the vertex
//! closing each letter's first edge are drawn uniformly; every other vertex
//! is forced by its letter (`v_i = v_{i-1} ± u_j` for Toeplitz,
//! `v_i = p_j - v_{i-1}` for Hankel) and must stay inside `[0, 1]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combin::{binomial, Word};
use crate::entries::{MomentProfile, ProfileFn};
use crate::error::{Error, Result};
use crate::patterns::LinkPattern;
use crate::rng::Stream;
use crate::stats::MeanSe;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    /// Samples per integral term.
    pub samples: u64,
    pub seed: u64,
    /// Largest number of sign sets accepted for one word.
    pub max_sign_sets: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            seed: 0,
            max_sign_sets: 10_000,
        }
    }
}

impl McConfig {
    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Weight contributed by a letter occurring `size` times whose link argument
/// (`|v_{i-1} - v_i|` or `v_{i-1} + v_i`) is `arg`.
pub trait BlockWeight: Sync {
    fn weight(&self, size: usize, arg: f64) -> f64;

    /// True when the weight is identically zero for this block size, so the
    /// term can be skipped.
    fn vanishes(&self, _size: usize) -> bool {
        false
    }
}

/// `g_{size}(arg)` from a moment profile.
impl BlockWeight for MomentProfile {
    fn weight(&self, size: usize, arg: f64) -> f64 {
        self.g(size).map_or(0.0, |g| g.eval(arg))
    }

    fn vanishes(&self, size: usize) -> bool {
        matches!(self.g(size), Ok(ProfileFn::Constant { value }) if *value == 0.0)
            || self.g(size).is_err()
    }
}

/// `C_size · σ(arg)^size · 1[arg ∈ support]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeight {
    /// `c[s - 1] = C_s`
    pub c: Vec<f64>,
    pub sigma: Option<ProfileFn>,
    /// Closed intervals of the link-argument domain; `None` keeps everything.
    pub support: Option<Vec<(f64, f64)>>,
}

impl KernelWeight {
    pub fn constants(c: Vec<f64>) -> Self {
        KernelWeight {
            c,
            sigma: None,
            support: None,
        }
    }
}

impl BlockWeight for KernelWeight {
    #[inline]
    fn weight(&self, size: usize, arg: f64) -> f64 {
        if let Some(support) = &self.support {
            if !support.iter().any(|&(lo, hi)| lo <= arg && arg <= hi) {
                return 0.0;
            }
        }
        let c = self.c.get(size - 1).copied().unwrap_or(0.0);
        match &self.sigma {
            None => c,
            Some(s) => c * s.eval(arg).powi(size as i32),
        }
    }

    fn vanishes(&self, size: usize) -> bool {
        self.c.get(size - 1).is_none_or(|&c| c == 0.0)
    }
}

/// Unit weight: the bare volume `α(ω)`.
pub struct UnitWeight;

impl BlockWeight for UnitWeight {
    fn weight(&self, _size: usize, _arg: f64) -> f64 {
        1.0
    }
}

/// Number of balanced sign sets `∏ C(k_j - 1, k_j / 2)` of a word whose
/// letter counts are `sizes`; zero if some count is odd.
pub fn sign_set_count(sizes: &[usize]) -> Result<u128> {
    let mut total: u128 = 1;
    for &s in sizes {
        if s % 2 == 1 {
            return Ok(0);
        }
        total = total
            .checked_mul(binomial(s as u64 - 1, s as u64 / 2)?)
            .ok_or_else(|| Error::Range("sign-set count overflows".into()))?;
    }
    Ok(total)
}

fn letter_positions(w: &Word) -> Vec<Vec<usize>> {
    let mut pos = vec![Vec::new(); w.distinct_letters()];
    for (i, &l) in w.letters().iter().enumerate() {
        pos[l as usize].push(i);
    }
    pos
}

fn subsets_of_size(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// All balanced sign assignments of an even word: per edge `+1` or `-1`, the
/// first edge of every letter positive and each letter summing to zero.
pub fn sign_sets(w: &Word, cap: u64) -> Result<Vec<Vec<i8>>> {
    let pos = letter_positions(w);
    let sizes: Vec<usize> = pos.iter().map(Vec::len).collect();
    let count = sign_set_count(&sizes)?;
    if count > cap as u128 {
        return Err(Error::capacity(
            format!("sign sets of '{w}'"),
            count,
            cap as u128,
        ));
    }
    let mut sets = vec![vec![1i8; w.len()]];
    for occ in &pos {
        let later = &occ[1..];
        let choices = subsets_of_size(later.len(), occ.len() / 2);
        let mut next = Vec::with_capacity(sets.len() * choices.len());
        for s in &sets {
            for neg in &choices {
                let mut t = s.clone();
                for &q in neg {
                    t[later[q]] = -1;
                }
                next.push(t);
            }
        }
        sets = next;
    }
    Ok(sets)
}

/// Precomputed walk for one word and one sign set.
struct Walk {
    letters: Vec<usize>,
    signs: Vec<i8>,
    first: Vec<bool>,
    sizes: Vec<usize>,
}

impl Walk {
    fn new(w: &Word, signs: Vec<i8>) -> Self {
        let letters: Vec<usize> = w.letters().iter().map(|&l| l as usize).collect();
        let mut seen = vec![false; w.distinct_letters()];
        let mut sizes = vec![0; w.distinct_letters()];
        let first = letters
            .iter()
            .map(|&l| {
                sizes[l] += 1;
                !std::mem::replace(&mut seen[l], true)
            })
            .collect();
        Walk {
            letters,
            signs,
            first,
            sizes,
        }
    }

    /// One sample of the integrand.
    #[inline]
    fn sample<W: BlockWeight + ?Sized>(
        &self,
        pattern: LinkPattern,
        weight: &W,
        triangular: bool,
        rng: &mut Stream,
        args: &mut [f64],
    ) -> f64 {
        let mut v: f64 = rng.random();
        let v0 = v;
        for (i, &l) in self.letters.iter().enumerate() {
            let next = if self.first[i] {
                let fresh: f64 = rng.random();
                args[l] = match pattern {
                    LinkPattern::Toeplitz => fresh - v,
                    _ => v + fresh,
                };
                fresh
            } else {
                let forced = match pattern {
                    LinkPattern::Toeplitz => v + self.signs[i] as f64 * args[l],
                    _ => args[l] - v,
                };
                if !(0.0..=1.0).contains(&forced) {
                    return 0.0;
                }
                forced
            };
            if triangular && v + next > 1.0 {
                return 0.0;
            }
            v = next;
        }
        debug_assert!((v - v0).abs() < 1e-9);
        let mut prod = 1.0;
        for (l, &size) in self.sizes.iter().enumerate() {
            let arg = match pattern {
                LinkPattern::Toeplitz => args[l].abs(),
                _ => args[l],
            };
            prod *= weight.weight(size, arg);
            if prod == 0.0 {
                break;
            }
        }
        prod
    }
}

/// One integral term: a word with a fixed sign set (ignored for Hankel).
pub(crate) fn term_estimate<W: BlockWeight + ?Sized>(
    pattern: LinkPattern,
    w: &Word,
    signs: Vec<i8>,
    weight: &W,
    triangular: bool,
    samples: u64,
    rng: &mut Stream,
) -> MeanSe {
    let walk = Walk::new(w, signs);
    let mut args = vec![0.0; w.distinct_letters()];
    let mut acc = MeanSe::accumulator();
    for _ in 0..samples {
        acc.push(walk.sample(pattern, weight, triangular, rng, &mut args));
    }
    acc.finish()
}
