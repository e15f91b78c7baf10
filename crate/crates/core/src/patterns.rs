//! Link functions for the four patterns, band and triangular masks, and the
//! bookkeeping that maps matrix positions onto input-sequence indices.
//!
//! Matrix positions are 1-based throughout (`1 ≤ i, j ≤ n`), matching the
//! circuit conventions used by the counting code. Input indices follow the
//! usual conventions: `0..n` for reverse circulant and Toeplitz,
//! `0..=n/2` for symmetric circulant and `2..=2n` for Hankel.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkPattern {
    #[serde(rename = "rc")]
    ReverseCirculant,
    #[serde(rename = "sc")]
    SymmetricCirculant,
    #[serde(rename = "toeplitz")]
    Toeplitz,
    #[serde(rename = "hankel")]
    Hankel,
}

impl LinkPattern {
    pub const ALL: [LinkPattern; 4] = [
        LinkPattern::ReverseCirculant,
        LinkPattern::SymmetricCirculant,
        LinkPattern::Toeplitz,
        LinkPattern::Hankel,
    ];

    /// Largest number of columns in a single row sharing one link value.
    pub fn delta(self) -> usize {
        match self {
            LinkPattern::ReverseCirculant | LinkPattern::Hankel => 1,
            LinkPattern::SymmetricCirculant | LinkPattern::Toeplitz => 2,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            LinkPattern::ReverseCirculant => "rc",
            LinkPattern::SymmetricCirculant => "sc",
            LinkPattern::Toeplitz => "toeplitz",
            LinkPattern::Hankel => "hankel",
        }
    }

    /// Unchecked link value for 1-based `i, j` in `1..=n`.
    #[inline]
    pub fn link(self, n: usize, i: usize, j: usize) -> usize {
        debug_assert!((1..=n).contains(&i) && (1..=n).contains(&j));
        match self {
            LinkPattern::ReverseCirculant => (i + j - 2) % n,
            LinkPattern::SymmetricCirculant => {
                // Equal to n/2 - |n/2 - |i-j|| for every n, including odd n.
                let d = i.abs_diff(j);
                d.min(n - d)
            }
            LinkPattern::Toeplitz => i.abs_diff(j),
            LinkPattern::Hankel => i + j,
        }
    }

    /// All columns `c ∈ 1..=n` with `link(row, c) == t`, at most [`delta`](Self::delta) of them.
    #[inline]
    pub fn preimages(self, n: usize, row: usize, t: usize) -> Preimages {
        let mut out = Preimages::default();
        match self {
            LinkPattern::ReverseCirculant => {
                if t < n {
                    let c = (t + 2 + n - row) % n;
                    out.push(if c == 0 { n } else { c });
                }
            }
            LinkPattern::SymmetricCirculant => {
                if 2 * t <= n {
                    let up = (row - 1 + t) % n + 1;
                    let down = (row - 1 + n - t) % n + 1;
                    out.push(up);
                    if down != up {
                        out.push(down);
                    }
                }
            }
            LinkPattern::Toeplitz => {
                if row + t <= n {
                    out.push(row + t);
                }
                if t > 0 && row > t {
                    out.push(row - t);
                }
            }
            LinkPattern::Hankel => {
                if t > row && t - row <= n {
                    out.push(t - row);
                }
            }
        }
        out
    }

    /// Offset of the first input index (2 for Hankel, 0 otherwise).
    pub fn input_offset(self) -> usize {
        match self {
            LinkPattern::Hankel => 2,
            _ => 0,
        }
    }

    /// Scale that maps an input index onto the profile domain (`index / n`).
    /// The domain is `[0, 1]` except for Hankel, which uses `[0, 2]`.
    pub fn profile_domain(self) -> (f64, f64) {
        match self {
            LinkPattern::Hankel => (0.0, 2.0),
            _ => (0.0, 1.0),
        }
    }
}

impl fmt::Display for LinkPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for LinkPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rc" | "reverse-circulant" => Ok(LinkPattern::ReverseCirculant),
            "sc" | "symmetric-circulant" => Ok(LinkPattern::SymmetricCirculant),
            "t" | "toeplitz" => Ok(LinkPattern::Toeplitz),
            "h" | "hankel" => Ok(LinkPattern::Hankel),
            other => Err(Error::Argument(format!("unknown pattern '{other}'"))),
        }
    }
}

/// Small fixed-capacity list returned by [`LinkPattern::preimages`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Preimages {
    buf: [usize; 2],
    len: usize,
}

impl Preimages {
    #[inline]
    fn push(&mut self, c: usize) {
        self.buf[self.len] = c;
        self.len += 1;
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.buf[..self.len]
    }
}

fn check_position(n: usize, i: usize, j: usize) -> Result<()> {
    if n < 1 || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(Error::Argument(format!(
            "position ({i}, {j}) outside 1..={n}"
        )));
    }
    Ok(())
}

/// Checked link value for the 1-based position `(i, j)`.
pub fn link_value(pattern: LinkPattern, n: usize, i: usize, j: usize) -> Result<usize> {
    check_position(n, i, j)?;
    Ok(pattern.link(n, i, j))
}

/// Number of distinct input variables used by an `n × n` matrix.
pub fn input_length(pattern: LinkPattern, n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::Argument(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    Ok(match pattern {
        LinkPattern::ReverseCirculant | LinkPattern::Toeplitz => n,
        LinkPattern::SymmetricCirculant => n / 2 + 1,
        LinkPattern::Hankel => 2 * n - 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum MaskKind {
    #[default]
    #[serde(rename = "none")]
    None,
    #[serde(rename = "band1")]
    BandTypeI,
    #[serde(rename = "band2")]
    BandTypeII,
    #[serde(rename = "tri")]
    Triangular,
}

impl FromStr for MaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(MaskKind::None),
            "band1" | "band-i" => Ok(MaskKind::BandTypeI),
            "band2" | "band-ii" => Ok(MaskKind::BandTypeII),
            "tri" | "triangular" => Ok(MaskKind::Triangular),
            other => Err(Error::Argument(format!("unknown mask '{other}'"))),
        }
    }
}

/// Which entries of a patterned matrix survive.
///
/// Band masks act on the link index, the triangular mask on positions. The
/// band ratio `alpha` is kept as given; the bandwidth at a concrete `n` is
/// `m` when set explicitly and `⌊alpha·n⌋` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSpec {
    pub kind: MaskKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl MaskSpec {
    pub const NONE: MaskSpec = MaskSpec {
        kind: MaskKind::None,
        alpha: None,
        m: None,
    };

    pub const TRIANGULAR: MaskSpec = MaskSpec {
        kind: MaskKind::Triangular,
        alpha: None,
        m: None,
    };

    pub fn band_i(alpha: f64) -> Self {
        MaskSpec {
            kind: MaskKind::BandTypeI,
            alpha: Some(alpha),
            m: None,
        }
    }

    pub fn band_ii(alpha: f64) -> Self {
        MaskSpec {
            kind: MaskKind::BandTypeII,
            alpha: Some(alpha),
            m: None,
        }
    }

    /// Band mask with an explicit bandwidth; `alpha` is still required as the
    /// intended limit ratio.
    pub fn with_bandwidth(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn is_band(&self) -> bool {
        matches!(self.kind, MaskKind::BandTypeI | MaskKind::BandTypeII)
    }

    /// Validates the mask against a pattern, independent of `n`.
    pub fn validate(&self, pattern: LinkPattern) -> Result<()> {
        match self.kind {
            MaskKind::None => {}
            MaskKind::BandTypeI | MaskKind::BandTypeII => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Config("band masks need the limit ratio alpha".into()))?;
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::Config(format!(
                        "band ratio alpha must lie in (0, 1], got {alpha}"
                    )));
                }
                if self.kind == MaskKind::BandTypeII && pattern == LinkPattern::SymmetricCirculant {
                    return Err(Error::Config(
                        "type II banding is defined for rc, toeplitz and hankel only".into(),
                    ));
                }
            }
            MaskKind::Triangular => {
                if pattern == LinkPattern::ReverseCirculant {
                    return Err(Error::Config(
                        "triangular masking is defined for sc, toeplitz and hankel only".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Bandwidth `m` at dimension `n` (band masks only).
    pub fn bandwidth(&self, n: usize) -> Result<Option<usize>> {
        if !self.is_band() {
            return Ok(None);
        }
        let alpha = self
            .alpha
            .ok_or_else(|| Error::Config("band masks need alpha".into()))?;
        let m = self.m.unwrap_or((alpha * n as f64).floor() as usize);
        if m < 1 || m >= n {
            return Err(Error::Config(format!(
                "bandwidth m = {m} must satisfy 1 ≤ m < n = {n}"
            )));
        }
        Ok(Some(m))
    }

    /// Intervals of the link-argument domain (index / n) kept by the mask in
    /// the limit. `None` for the positional triangular mask.
    pub fn limit_support(&self, pattern: LinkPattern) -> Option<Vec<(f64, f64)>> {
        let (lo, hi) = pattern.profile_domain();
        let alpha = self.alpha.unwrap_or(1.0);
        match self.kind {
            MaskKind::None => Some(vec![(lo, hi)]),
            MaskKind::BandTypeI => Some(vec![(lo, alpha.min(hi))]),
            MaskKind::BandTypeII => match pattern {
                LinkPattern::Hankel => Some(vec![(1.0 - alpha, 1.0 + alpha)]),
                _ => Some(vec![(0.0, alpha), (1.0 - alpha, 1.0)]),
            },
            MaskKind::Triangular => None,
        }
    }
}

/// A concrete mask at a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mask {
    None,
    BandI { m: usize },
    BandII { m: usize },
    Triangular,
}

impl Mask {
    pub fn instantiate(spec: &MaskSpec, pattern: LinkPattern, n: usize) -> Result<Self> {
        spec.validate(pattern)?;
        Ok(match spec.kind {
            MaskKind::None => Mask::None,
            MaskKind::Triangular => Mask::Triangular,
            MaskKind::BandTypeI => Mask::BandI {
                m: spec.bandwidth(n)?.expect("band mask"),
            },
            MaskKind::BandTypeII => Mask::BandII {
                m: spec.bandwidth(n)?.expect("band mask"),
            },
        })
    }

    /// Whether the input variable with link index `t` is kept. Positional
    /// masks keep every index.
    #[inline]
    pub fn keeps_index(&self, pattern: LinkPattern, n: usize, t: usize) -> bool {
        match *self {
            Mask::None | Mask::Triangular => true,
            Mask::BandI { m } => t <= m,
            Mask::BandII { m } => match pattern {
                LinkPattern::Hankel => n - m <= t && t <= n + m,
                _ => t <= m || t >= n - m,
            },
        }
    }

    #[inline]
    pub fn keeps(&self, pattern: LinkPattern, n: usize, i: usize, j: usize) -> bool {
        match *self {
            Mask::Triangular => i + j <= n + 1,
            _ => self.keeps_index(pattern, n, pattern.link(n, i, j)),
        }
    }

    pub fn is_positional(&self) -> bool {
        matches!(self, Mask::Triangular)
    }
}

/// Pattern, dimension and mask of one matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub pattern: LinkPattern,
    pub n: usize,
    #[serde(default)]
    pub mask: MaskSpec,
}

impl MatrixSpec {
    pub fn new(pattern: LinkPattern, n: usize) -> Self {
        MatrixSpec {
            pattern,
            n,
            mask: MaskSpec::NONE,
        }
    }

    pub fn with_mask(mut self, mask: MaskSpec) -> Self {
        self.mask = mask;
        self
    }

    pub fn validate(&self) -> Result<Mask> {
        if self.n < 2 {
            return Err(Error::Config(format!(
                "dimension must be at least 2, got {}",
                self.n
            )));
        }
        Mask::instantiate(&self.mask, self.pattern, self.n)
    }
}

/// Checked mask test for the 1-based position `(i, j)`.
pub fn mask_keeps(
    mask: &MaskSpec,
    pattern: LinkPattern,
    n: usize,
    i: usize,
    j: usize,
) -> Result<bool> {
    check_position(n, i, j)?;
    let mask = Mask::instantiate(mask, pattern, n)?;
    Ok(mask.keeps(pattern, n, i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use LinkPattern::*;

    #[test]
    fn link_values_match_matrix_displays() {
        assert_eq!(link_value(ReverseCirculant, 5, 2, 5).unwrap(), 0);
        assert_eq!(link_value(SymmetricCirculant, 5, 1, 5).unwrap(), 1);
        assert_eq!(link_value(Hankel, 5, 1, 1).unwrap(), 2);
        assert_eq!(link_value(Toeplitz, 5, 1, 5).unwrap(), 4);
        // Last row of the reverse circulant starts with x_{n-1}.
        assert_eq!(link_value(ReverseCirculant, 5, 5, 1).unwrap(), 4);
        assert_eq!(link_value(ReverseCirculant, 5, 5, 2).unwrap(), 0);
    }

    #[test]
    fn out_of_range_positions_are_rejected() {
        assert!(matches!(
            link_value(Toeplitz, 5, 0, 1),
            Err(Error::Argument(_))
        ));
        assert!(link_value(Toeplitz, 5, 1, 6).is_err());
    }

    #[test]
    fn input_lengths() {
        assert_eq!(input_length(ReverseCirculant, 5).unwrap(), 5);
        assert_eq!(input_length(SymmetricCirculant, 5).unwrap(), 3);
        assert_eq!(input_length(Hankel, 5).unwrap(), 9);
        assert_eq!(input_length(Toeplitz, 5).unwrap(), 5);
        assert!(input_length(Toeplitz, 1).is_err());
    }

    #[test]
    fn delta_bound_holds_exhaustively() {
        for pattern in LinkPattern::ALL {
            for n in 2..=64 {
                for row in 1..=n {
                    let mut counts = std::collections::HashMap::new();
                    for col in 1..=n {
                        *counts.entry(pattern.link(n, row, col)).or_insert(0usize) += 1;
                    }
                    assert!(counts.values().all(|&c| c <= pattern.delta()));
                }
            }
        }
    }

    #[test]
    fn sc_link_identity_including_odd_n() {
        for n in 2..=40usize {
            for i in 1..=n {
                for j in 1..=n {
                    let d = i.abs_diff(j) as f64;
                    let half = n as f64 / 2.0;
                    let folded = half - (half - d).abs();
                    let got = SymmetricCirculant.link(n, i, j) as f64;
                    assert_eq!(got, folded, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn preimages_agree_with_brute_force() {
        for pattern in LinkPattern::ALL {
            for n in 2..=12 {
                for row in 1..=n {
                    for t in 0..=2 * n + 1 {
                        let mut brute: Vec<usize> =
                            (1..=n).filter(|&c| pattern.link(n, row, c) == t).collect();
                        let mut fast = pattern.preimages(n, row, t).as_slice().to_vec();
                        brute.sort_unstable();
                        fast.sort_unstable();
                        assert_eq!(brute, fast, "{pattern} n={n} row={row} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn band_and_triangular_masks() {
        let band1 = MaskSpec::band_i(0.2).with_bandwidth(1);
        assert!(!mask_keeps(&band1, ReverseCirculant, 5, 1, 3).unwrap());
        assert!(mask_keeps(&band1, ReverseCirculant, 5, 1, 2).unwrap());

        let band2 = MaskSpec::band_ii(0.2).with_bandwidth(1);
        assert!(!mask_keeps(&band2, Hankel, 5, 1, 1).unwrap());
        let kept: Vec<usize> = (2..=10)
            .filter(|&t| Mask::BandII { m: 1 }.keeps_index(Hankel, 5, t))
            .collect();
        assert_eq!(kept, vec![4, 5, 6]);

        assert!(mask_keeps(&MaskSpec::TRIANGULAR, Hankel, 5, 3, 3).unwrap());
        assert!(!mask_keeps(&MaskSpec::TRIANGULAR, Hankel, 5, 3, 4).unwrap());
    }

    #[test]
    fn rc_type_ii_band_matches_display() {
        // RC_5^B keeps x_0, x_1 and x_4.
        let mask = Mask::BandII { m: 1 };
        let kept: Vec<usize> = (0..5)
            .filter(|&t| mask.keeps_index(ReverseCirculant, 5, t))
            .collect();
        assert_eq!(kept, vec![0, 1, 4]);
    }

    #[test]
    fn none_mask_and_full_band_keep_everything() {
        for pattern in [ReverseCirculant, Toeplitz] {
            let full = MaskSpec::band_i(1.0).with_bandwidth(9);
            for i in 1..=10 {
                for j in 1..=10 {
                    assert!(mask_keeps(&MaskSpec::NONE, pattern, 10, i, j).unwrap());
                    assert!(mask_keeps(&full, pattern, 10, i, j).unwrap());
                }
            }
        }
    }

    #[test]
    fn invalid_mask_combinations() {
        assert!(matches!(
            MaskSpec::TRIANGULAR.validate(ReverseCirculant),
            Err(Error::Config(_))
        ));
        assert!(MaskSpec::band_ii(0.3).validate(SymmetricCirculant).is_err());
        assert!(MaskSpec::band_i(0.0).validate(Toeplitz).is_err());
        assert!(MaskSpec::band_i(0.5)
            .with_bandwidth(10)
            .bandwidth(10)
            .is_err());
        assert_eq!(MaskSpec::band_i(0.5).bandwidth(11).unwrap(), Some(5));
    }

    #[test]
    fn link_is_symmetric() {
        for pattern in LinkPattern::ALL {
            for n in [2usize, 3, 7, 16] {
                for i in 1..=n {
                    for j in 1..=n {
                        assert_eq!(pattern.link(n, i, j), pattern.link(n, j, i));
                    }
                }
            }
        }
    }
}
