//! Entry models for the input sequence: distributions, variance profiles,
//! truncation, limit constants and seeded sampling.

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::{input_length, LinkPattern};
use crate::rng::Stream;
use crate::stats::MeanSe;

/// Midpoint panels used for tabulated profiles.
pub const QUADRATURE_PANELS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDistribution {
    Normal,
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    Uniform,
}

impl BaseDistribution {
    /// One draw with mean 0 and variance 1.
    #[inline]
    pub fn sample(self, rng: &mut Stream) -> f64 {
        match self {
            BaseDistribution::Normal => rng.sample(StandardNormal),
            BaseDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            BaseDistribution::Uniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleRule {
    /// `n^{-1/2}`
    #[default]
    InvSqrtN,
    /// `m^{-1/2}` with `m = ⌊alpha·n⌋`, the usual band-matrix scaling.
    InvSqrtBandwidth { alpha: f64 },
}

impl ScaleRule {
    pub fn factor(&self, n: usize) -> Result<f64> {
        match *self {
            ScaleRule::InvSqrtN => Ok(1.0 / (n as f64).sqrt()),
            ScaleRule::InvSqrtBandwidth { alpha } => {
                let m = (alpha * n as f64).floor();
                if !(alpha > 0.0) || m < 1.0 {
                    return Err(Error::Config(format!(
                        "bandwidth scaling needs ⌊alpha·n⌋ ≥ 1 (alpha = {alpha}, n = {n})"
                    )));
                }
                Ok(1.0 / m.sqrt())
            }
        }
    }

    /// Limit of `n · factor(n)^2`.
    fn variance_limit(&self) -> f64 {
        match *self {
            ScaleRule::InvSqrtN => 1.0,
            ScaleRule::InvSqrtBandwidth { alpha } => 1.0 / alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseModel {
    /// `scale(n) · Z` with `Z` drawn from a unit-variance distribution.
    ScaledIid {
        dist: BaseDistribution,
        #[serde(default)]
        scale: ScaleRule,
    },
    /// Bernoulli(λ/n), unscaled.
    SparseBernoulli { lambda: f64 },
    /// Binomial(trials, λ/n), unscaled: the input of a sum of `trials`
    /// independent sparse matrices.
    Binomial { trials: u32, lambda: f64 },
}

impl BaseModel {
    pub fn normal() -> Self {
        BaseModel::ScaledIid {
            dist: BaseDistribution::Normal,
            scale: ScaleRule::InvSqrtN,
        }
    }

    fn check_at(&self, n: usize) -> Result<()> {
        match *self {
            BaseModel::ScaledIid { scale, .. } => scale.factor(n).map(|_| ()),
            BaseModel::SparseBernoulli { lambda } | BaseModel::Binomial { lambda, .. } => {
                if !(lambda > 0.0) {
                    return Err(Error::Config(format!(
                        "lambda must be positive, got {lambda}"
                    )));
                }
                if lambda / n as f64 > 1.0 {
                    return Err(Error::Config(format!(
                        "success probability lambda/n = {} exceeds 1 at n = {n}",
                        lambda / n as f64
                    )));
                }
                if let BaseModel::Binomial { trials: 0, .. } = self {
                    return Err(Error::Config("binomial model needs trials ≥ 1".into()));
                }
                Ok(())
            }
        }
    }
}

/// A real function on an interval, given by one of a few presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileFn {
    Constant {
        value: f64,
    },
    /// `Σ coeffs[i] x^i`
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// Indicator of a union of closed intervals.
    Indicator {
        intervals: Vec<(f64, f64)>,
    },
    /// Linear interpolation through `(xs[i], ys[i])`, constant beyond the ends.
    Tabulated {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

/// A definite integral with a bound on its discretization error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error_bound: f64,
}

impl Quadrature {
    pub fn exact(value: f64) -> Self {
        Quadrature {
            value,
            error_bound: 0.0,
        }
    }
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl ProfileFn {
    pub fn constant(value: f64) -> Self {
        ProfileFn::Constant { value }
    }

    pub fn identity() -> Self {
        ProfileFn::Polynomial {
            coeffs: vec![0.0, 1.0],
        }
    }

    pub fn indicator(lo: f64, hi: f64) -> Self {
        ProfileFn::Indicator {
            intervals: vec![(lo, hi)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ProfileFn::Constant { value } if !value.is_finite() => {
                Err(Error::Config("constant profile must be finite".into()))
            }
            ProfileFn::Polynomial { coeffs } if !finite(coeffs) => Err(Error::Config(
                "polynomial coefficients must be finite".into(),
            )),
            ProfileFn::Indicator { intervals } => {
                for &(lo, hi) in intervals {
                    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                        return Err(Error::Config(format!(
                            "bad indicator interval [{lo}, {hi}]"
                        )));
                    }
                }
                Ok(())
            }
            ProfileFn::Tabulated { xs, ys } => {
                if xs.len() < 2 || xs.len() != ys.len() {
                    return Err(Error::Config(
                        "tabulated profile needs ≥ 2 knots and equal-length xs, ys".into(),
                    ));
                }
                if !finite(xs) || !finite(ys) || xs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config(
                        "tabulated profile knots must be finite and strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ProfileFn::Constant { value } => *value,
            ProfileFn::Polynomial { coeffs } => poly_eval(coeffs, x),
            ProfileFn::Indicator { intervals } => {
                if intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi) {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileFn::Tabulated { xs, ys } => {
                let last = xs.len() - 1;
                if x <= xs[0] {
                    return ys[0];
                }
                if x >= xs[last] {
                    return ys[last];
                }
                let i = xs.partition_point(|&k| k <= x) - 1;
                let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                ys[i] + t * (ys[i + 1] - ys[i])
            }
        }
    }

    /// An upper bound on `sup |f|` over `[lo, hi]`; exact except for
    /// polynomials, where a grid maximum is padded by a Lipschitz term.
    pub fn sup_norm(&self, lo: f64, hi: f64) -> f64 {
        match self {
            ProfileFn::Constant { value } => value.abs(),
            ProfileFn::Indicator { intervals } => {
                if intervals.iter().any(|&(a, b)| a <= hi && b >= lo) {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileFn::Tabulated { xs, .. } => {
                let mut m = self.eval(lo).abs().max(self.eval(hi).abs());
                for &x in xs.iter().filter(|&&x| lo <= x && x <= hi) {
                    m = m.max(self.eval(x).abs());
                }
                m
            }
            ProfileFn::Polynomial { coeffs } => {
                let grid = QUADRATURE_PANELS;
                let h = (hi - lo) / grid as f64;
                let r = lo.abs().max(hi.abs());
                let lipschitz: f64 = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| i as f64 * c.abs() * r.powi(i as i32 - 1))
                    .sum();
                let grid_max = (0..=grid)
                    .map(|j| poly_eval(coeffs, lo + j as f64 * h).abs())
                    .fold(0.0, f64::max);
                grid_max + lipschitz * h / 2.0
            }
        }
    }

    /// `∫_lo^hi f(x)^p dx`.
    pub fn integral_pow(&self, lo: f64, hi: f64, p: u32) -> Quadrature {
        if hi <= lo {
            return Quadrature::exact(0.0);
        }
        match self {
            ProfileFn::Constant { value } => Quadrature::exact(value.powi(p as i32) * (hi - lo)),
            ProfileFn::Indicator { intervals } => {
                if p == 0 {
                    return Quadrature::exact(hi - lo);
                }
                // Measure of the union intersected with [lo, hi].
                let mut clipped: Vec<(f64, f64)> = intervals
                    .iter()
                    .map(|&(a, b)| (a.max(lo), b.min(hi)))
                    .filter(|&(a, b)| a < b)
                    .collect();
                clipped.sort_by(|x, y| x.0.total_cmp(&y.0));
                let mut total = 0.0;
                let mut reach = f64::NEG_INFINITY;
                for (a, b) in clipped {
                    let start = a.max(reach);
                    if b > start {
                        total += b - start;
                    }
                    reach = reach.max(b);
                }
                Quadrature::exact(total)
            }
            ProfileFn::Polynomial { coeffs } => {
                let mut power = vec![1.0];
                for _ in 0..p {
                    power = poly_mul(&power, coeffs);
                }
                let antider = |x: f64| {
                    power
                        .iter()
                        .enumerate()
                        .rev()
                        .fold(0.0, |acc, (i, &c)| acc * x + c / (i as f64 + 1.0))
                        * x
                };
                Quadrature::exact(antider(hi) - antider(lo))
            }
            ProfileFn::Tabulated { .. } => {
                let g = QUADRATURE_PANELS;
                let h = (hi - lo) / g as f64;
                let f = |x: f64| self.eval(x).powi(p as i32);
                let midpoint: f64 = (0..g).map(|j| f(lo + (j as f64 + 0.5) * h)).sum::<f64>() * h;
                let trapezoid: f64 =
                    (0.5 * (f(lo) + f(hi)) + (1..g).map(|j| f(lo + j as f64 * h)).sum::<f64>()) * h;
                Quadrature {
                    value: midpoint,
                    error_bound: (midpoint - trapezoid).abs(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VarianceProfile {
    #[default]
    None,
    /// `σ_i = sigma[i mod sigma.len()]` for input index `i`.
    Discrete { sigma: Vec<f64> },
    /// `σ_i = sigma(i / n)`.
    Continuous { sigma: ProfileFn },
}

impl VarianceProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            VarianceProfile::None => Ok(()),
            VarianceProfile::Discrete { sigma } => {
                if sigma.is_empty() || sigma.iter().any(|s| !s.is_finite()) {
                    return Err(Error::Config(
                        "discrete profile needs a nonempty list of finite values".into(),
                    ));
                }
                Ok(())
            }
            VarianceProfile::Continuous { sigma } => sigma.validate(),
        }
    }

    #[inline]
    pub fn factor(&self, index: usize, n: usize) -> f64 {
        match self {
            VarianceProfile::None => 1.0,
            VarianceProfile::Discrete { sigma } => sigma[index % sigma.len()],
            VarianceProfile::Continuous { sigma } => sigma.eval(index as f64 / n as f64),
        }
    }

    /// `sup |σ|` on the given domain.
    pub fn bound(&self, lo: f64, hi: f64) -> f64 {
        match self {
            VarianceProfile::None => 1.0,
            VarianceProfile::Discrete { sigma } => sigma.iter().fold(0.0, |m, s| m.max(s.abs())),
            VarianceProfile::Continuous { sigma } => sigma.sup_norm(lo, hi),
        }
    }
}

/// Truncation level `t_n`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Truncation {
    #[default]
    None,
    /// `t_n = n^exponent`
    Power {
        exponent: f64,
    },
    Constant {
        t: f64,
    },
}

impl Truncation {
    pub fn level(&self, n: usize) -> f64 {
        match *self {
            Truncation::None => f64::INFINITY,
            Truncation::Power { exponent } => (n as f64).powf(exponent),
            Truncation::Constant { t } => t,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Truncation::Constant { t } if !(t > 0.0) => Err(Error::Config(format!(
                "truncation level must be positive, got {t}"
            ))),
            Truncation::Power { exponent } if !exponent.is_finite() => {
                Err(Error::Config("truncation exponent must be finite".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    ScaledIid,
    TriangularIid,
    DiscreteVarianceProfile,
    ContinuousVarianceProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryModel {
    pub base: BaseModel,
    #[serde(default)]
    pub profile: VarianceProfile,
    #[serde(default)]
    pub truncation: Truncation,
}

impl EntryModel {
    pub fn new(base: BaseModel) -> Self {
        EntryModel {
            base,
            profile: VarianceProfile::None,
            truncation: Truncation::None,
        }
    }

    pub fn with_profile(mut self, profile: VarianceProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn kind(&self) -> EntryKind {
        match (&self.profile, &self.base) {
            (VarianceProfile::Discrete { .. }, _) => EntryKind::DiscreteVarianceProfile,
            (VarianceProfile::Continuous { .. }, _) => EntryKind::ContinuousVarianceProfile,
            (VarianceProfile::None, BaseModel::ScaledIid { .. }) => EntryKind::ScaledIid,
            (VarianceProfile::None, _) => EntryKind::TriangularIid,
        }
    }

    pub fn validate_at(&self, n: usize) -> Result<()> {
        self.base.check_at(n)?;
        self.profile.validate()?;
        self.truncation.validate()
    }

    /// One draw of `x_i` at dimension `n` for input index `index`.
    #[inline]
    fn draw(&self, index: usize, n: usize, scale: f64, rng: &mut Stream) -> f64 {
        let raw = match self.base {
            BaseModel::ScaledIid { dist, .. } => scale * dist.sample(rng),
            BaseModel::SparseBernoulli { lambda } => {
                if rng.random::<f64>() < lambda / n as f64 {
                    1.0
                } else {
                    0.0
                }
            }
            BaseModel::Binomial { trials, lambda } => {
                let d = Binomial::new(trials as u64, lambda / n as f64)
                    .expect("probability checked by validate_at");
                d.sample(rng) as f64
            }
        };
        truncate(
            raw * self.profile.factor(index, n),
            self.truncation.level(n),
        )
    }

    fn scale(&self, n: usize) -> Result<f64> {
        match self.base {
            BaseModel::ScaledIid { scale, .. } => scale.factor(n),
            _ => Ok(1.0),
        }
    }
}

#[inline]
pub fn truncate(x: f64, t: f64) -> f64 {
    if x.abs() <= t {
        x
    } else {
        0.0
    }
}

/// Independent inputs for an `n × n` matrix, one per link index. Element `p`
/// of the result is the input with link index `p + pattern.input_offset()`.
pub fn sample_inputs(
    model: &EntryModel,
    pattern: LinkPattern,
    n: usize,
    stream: &mut Stream,
) -> Result<Vec<f64>> {
    model.validate_at(n)?;
    let len = input_length(pattern, n)?;
    let offset = pattern.input_offset();
    let scale = model.scale(n)?;
    Ok((0..len)
        .map(|p| model.draw(p + offset, n, scale, stream))
        .collect())
}

/// Limits `C_k = lim n E[x^k]` for `k = 1..=kmax`. Profiles and truncation
/// are ignored: a profile multiplies these constants and truncation at a
/// vanishing-residual level leaves them unchanged.
pub fn limit_constants(model: &EntryModel, kmax: usize) -> Result<Vec<f64>> {
    Ok((1..=kmax)
        .map(|k| match model.base {
            BaseModel::ScaledIid { scale, .. } => {
                if k == 2 {
                    scale.variance_limit()
                } else {
                    0.0
                }
            }
            BaseModel::SparseBernoulli { lambda } => lambda,
            BaseModel::Binomial { trials, lambda } => trials as f64 * lambda,
        })
        .collect())
}

/// Limit moment functions `g_{2k}` on the link-argument domain; `g[k - 1]` is
/// `g_{2k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentProfile {
    pub g: Vec<ProfileFn>,
    pub domain: (f64, f64),
}

impl MomentProfile {
    /// `g_{2k} ≡ c[2k - 1]` on `domain`, for `2k ≤ c.len()`.
    pub fn from_constants(c: &[f64], domain: (f64, f64)) -> Self {
        MomentProfile {
            g: c.iter()
                .skip(1)
                .step_by(2)
                .map(|&v| ProfileFn::constant(v))
                .collect(),
            domain,
        }
    }

    pub fn kmax(&self) -> usize {
        2 * self.g.len()
    }

    pub fn g(&self, two_k: usize) -> Result<&ProfileFn> {
        if two_k == 0 || two_k % 2 == 1 {
            return Err(Error::Range(format!(
                "g is indexed by even orders, got {two_k}"
            )));
        }
        self.g.get(two_k / 2 - 1).ok_or_else(|| {
            Error::Range(format!(
                "g_{two_k} requested but profile stops at g_{}",
                self.kmax()
            ))
        })
    }

    /// `M_{2k} ≥ sup |g_{2k}|` on the domain.
    pub fn sup_norms(&self) -> Vec<f64> {
        self.g
            .iter()
            .map(|f| f.sup_norm(self.domain.0, self.domain.1))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        if !(lo < hi) {
            return Err(Error::Config(format!("empty profile domain [{lo}, {hi}]")));
        }
        for f in &self.g {
            f.validate()?;
        }
        if let Some(g2) = self.g.first() {
            let grid = QUADRATURE_PANELS;
            let mut points: Vec<f64> = (0..=grid)
                .map(|j| lo + (hi - lo) * j as f64 / grid as f64)
                .collect();
            if let ProfileFn::Tabulated { xs, .. } = g2 {
                points.extend(xs.iter().copied().filter(|&x| lo <= x && x <= hi));
            }
            if let Some(x) = points.into_iter().find(|&x| g2.eval(x) < 0.0) {
                return Err(Error::Config(format!(
                    "g_2 must be nonnegative; g_2({x}) < 0"
                )));
            }
        }
        Ok(())
    }
}

/// `C_{2m}` from the profile: `∫_0^1 g_{2m}` for reverse circulant and
/// `2∫_0^{1/2} g_{2m}` for symmetric circulant. Entry `m - 1` holds `C_{2m}`.
pub fn profile_constants(profile: &MomentProfile, pattern: LinkPattern) -> Result<Vec<Quadrature>> {
    profile.validate()?;
    let (hi, factor) = match pattern {
        LinkPattern::ReverseCirculant => (1.0, 1.0),
        LinkPattern::SymmetricCirculant => (0.5, 2.0),
        other => {
            return Err(Error::Unsupported(format!(
                "profile constants are defined for rc and sc, not {other}"
            )))
        }
    };
    Ok(profile
        .g
        .iter()
        .map(|f| {
            let q = f.integral_pow(0.0, hi, 1);
            Quadrature {
                value: factor * q.value,
                error_bound: factor * q.error_bound,
            }
        })
        .collect())
}

/// Monte Carlo estimate of `Σ_{i<n} E[x_i² 1{|x_i| > t_n}]`.
///
/// Each sample draws a uniform index and one untruncated entry at it, so the
/// estimate is unbiased for the sum. Exactly zero when `t_n = ∞`.
pub fn truncation_residual(
    model: &EntryModel,
    n: usize,
    samples: usize,
    stream: &mut Stream,
) -> Result<MeanSe> {
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    model.validate_at(n)?;
    let t = model.truncation.level(n);
    if t.is_infinite() {
        return Ok(MeanSe::default());
    }
    let untruncated = EntryModel {
        truncation: Truncation::None,
        ..model.clone()
    };
    let scale = untruncated.scale(n)?;
    let mut acc = MeanSe::accumulator();
    for _ in 0..samples {
        let i = stream.random_range(0..n);
        let x = untruncated.draw(i, n, scale, stream);
        acc.push(if x.abs() > t { n as f64 * x * x } else { 0.0 });
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, stream_id, Domain};

    fn rng(k: u64) -> Stream {
        stream(11, stream_id(Domain::Test, k, 0))
    }

    #[test]
    fn sparse_bernoulli_draws() {
        let model = EntryModel::new(BaseModel::SparseBernoulli { lambda: 3.0 });
        let mut r = rng(1);
        let mut acc = MeanSe::accumulator();
        while acc.count() < 1_000_000 {
            for x in sample_inputs(&model, LinkPattern::ReverseCirculant, 10, &mut r).unwrap() {
                assert!(x == 0.0 || x == 1.0);
                acc.push(x);
            }
        }
        let est = acc.finish();
        assert!((est.mean - 0.3).abs() <= 3.0 * est.se, "{est:?}");
    }

    #[test]
    fn scaled_normal_variance() {
        let model = EntryModel::new(BaseModel::normal());
        let mut r = rng(2);
        let mut acc = MeanSe::accumulator();
        while acc.count() < 1_000_000 {
            for x in sample_inputs(&model, LinkPattern::Toeplitz, 100, &mut r).unwrap() {
                acc.push(x * x);
            }
        }
        let est = acc.finish();
        assert!((est.mean - 0.01).abs() <= 3.0 * est.se, "{est:?}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let model = EntryModel::new(BaseModel::Binomial {
            trials: 2,
            lambda: 1.5,
        });
        let a = sample_inputs(&model, LinkPattern::Hankel, 50, &mut rng(3)).unwrap();
        let b = sample_inputs(&model, LinkPattern::Hankel, 50, &mut rng(3)).unwrap();
        assert_eq!(a.len(), 99);
        assert_eq!(a, b);
    }

    #[test]
    fn probability_above_one_is_rejected() {
        let model = EntryModel::new(BaseModel::SparseBernoulli { lambda: 3.0 });
        assert!(matches!(
            sample_inputs(&model, LinkPattern::ReverseCirculant, 2, &mut rng(4)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn limit_constant_examples() {
        let sparse = EntryModel::new(BaseModel::SparseBernoulli { lambda: 3.0 });
        assert_eq!(limit_constants(&sparse, 6).unwrap(), vec![3.0; 6]);
        let iid = EntryModel::new(BaseModel::normal());
        assert_eq!(limit_constants(&iid, 4).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        let binom = EntryModel::new(BaseModel::Binomial {
            trials: 2,
            lambda: 1.0,
        });
        assert_eq!(limit_constants(&binom, 3).unwrap(), vec![2.0; 3]);
        let band = EntryModel::new(BaseModel::ScaledIid {
            dist: BaseDistribution::Rademacher,
            scale: ScaleRule::InvSqrtBandwidth { alpha: 0.5 },
        });
        assert_eq!(limit_constants(&band, 2).unwrap()[1], 2.0);
    }

    #[test]
    fn sparse_moments_match_limit_constants() {
        let lambda = 3.0;
        let model = EntryModel::new(BaseModel::SparseBernoulli { lambda });
        for (seed, n) in [(5u64, 100usize), (6, 1000)] {
            let mut r = rng(seed);
            let mut acc = MeanSe::accumulator();
            while acc.count() < 1_000_000 {
                for x in sample_inputs(&model, LinkPattern::ReverseCirculant, n, &mut r).unwrap() {
                    acc.push(n as f64 * x);
                }
            }
            // x ∈ {0, 1}, so n·x^k = n·x for every k ≥ 1.
            let est = acc.finish();
            assert!((est.mean - lambda).abs() <= 3.0 * est.se, "n={n} {est:?}");
        }
    }

    #[test]
    fn profile_constant_examples() {
        let rc = LinkPattern::ReverseCirculant;
        let sc = LinkPattern::SymmetricCirculant;
        let constant = MomentProfile {
            g: vec![ProfileFn::constant(1.7)],
            domain: (0.0, 1.0),
        };
        assert_eq!(profile_constants(&constant, rc).unwrap()[0].value, 1.7);

        let linear = MomentProfile {
            g: vec![ProfileFn::identity()],
            domain: (0.0, 1.0),
        };
        assert!((profile_constants(&linear, rc).unwrap()[0].value - 0.5).abs() < 1e-15);
        assert!((profile_constants(&linear, sc).unwrap()[0].value - 0.25).abs() < 1e-15);

        for alpha in [0.1, 0.3, 0.5] {
            let band = MomentProfile {
                g: vec![ProfileFn::indicator(0.0, alpha)],
                domain: (0.0, 1.0),
            };
            assert!((profile_constants(&band, rc).unwrap()[0].value - alpha).abs() < 1e-15);
            assert!((profile_constants(&band, sc).unwrap()[0].value - 2.0 * alpha).abs() < 1e-15);
        }
        assert!(profile_constants(&constant, LinkPattern::Hankel).is_err());
    }

    #[test]
    fn tabulated_quadrature_reports_its_error() {
        let f = ProfileFn::Tabulated {
            xs: vec![0.0, 0.5, 1.0],
            ys: vec![0.0, 1.0, 0.0],
        };
        let q = f.integral_pow(0.0, 1.0, 2);
        // ∫ of the squared hat function is 1/3.
        assert!((q.value - 1.0 / 3.0).abs() <= q.error_bound.max(1e-12));
        assert!(q.error_bound < 1e-6);
        let p = ProfileFn::identity().integral_pow(0.0, 1.0, 4);
        assert_eq!(p.error_bound, 0.0);
        assert!((p.value - 0.2).abs() < 1e-15);
    }

    #[test]
    fn sup_norms_dominate_samples() {
        let fns = [
            ProfileFn::Polynomial {
                coeffs: vec![0.1, -2.0, 3.0],
            },
            ProfileFn::Tabulated {
                xs: vec![0.0, 0.3, 2.0],
                ys: vec![-1.0, 4.0, 2.0],
            },
            ProfileFn::indicator(0.5, 0.7),
        ];
        for f in &fns {
            let m = f.sup_norm(0.0, 2.0);
            for j in 0..=10_000 {
                let x = 2.0 * j as f64 / 10_000.0;
                assert!(f.eval(x).abs() <= m + 1e-12);
            }
        }
    }

    #[test]
    fn negative_g2_is_rejected() {
        let bad = MomentProfile {
            g: vec![ProfileFn::Polynomial {
                coeffs: vec![0.5, -1.0],
            }],
            domain: (0.0, 1.0),
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn truncation_residuals() {
        let plain = EntryModel::new(BaseModel::normal());
        let est = truncation_residual(&plain, 100, 10, &mut rng(7)).unwrap();
        assert_eq!((est.mean, est.se), (0.0, 0.0));

        let bounded = EntryModel::new(BaseModel::ScaledIid {
            dist: BaseDistribution::Uniform,
            scale: ScaleRule::InvSqrtN,
        })
        .with_truncation(Truncation::Constant { t: 2.0 / 10.0 });
        let est = truncation_residual(&bounded, 100, 10_000, &mut rng(8)).unwrap();
        assert_eq!(est.mean, 0.0);

        let cut = plain.with_truncation(Truncation::Power {
            exponent: -1.0 / 3.0,
        });
        let small = truncation_residual(&cut, 10_000, 200_000, &mut rng(9)).unwrap();
        let large = truncation_residual(&cut, 100, 200_000, &mut rng(10)).unwrap();
        assert!(small.mean < large.mean);
        assert!(small.mean < 0.01);
    }

    #[test]
    fn profiles_scale_draws() {
        let model = EntryModel::new(BaseModel::ScaledIid {
            dist: BaseDistribution::Rademacher,
            scale: ScaleRule::InvSqrtN,
        })
        .with_profile(VarianceProfile::Continuous {
            sigma: ProfileFn::identity(),
        });
        let x = sample_inputs(&model, LinkPattern::Hankel, 4, &mut rng(12)).unwrap();
        for (p, v) in x.iter().enumerate() {
            let i = p + 2;
            assert!((v.abs() - (i as f64 / 4.0) / 2.0).abs() < 1e-15);
        }
        let discrete =
            EntryModel::new(BaseModel::normal()).with_profile(VarianceProfile::Discrete {
                sigma: vec![1.0, 0.0],
            });
        let x = sample_inputs(&discrete, LinkPattern::Toeplitz, 10, &mut rng(13)).unwrap();
        assert!(x.iter().skip(1).step_by(2).all(|&v| v == 0.0));
        assert_eq!(discrete.kind(), EntryKind::DiscreteVarianceProfile);
    }

    #[test]
    fn config_round_trip() {
        let model = EntryModel::new(BaseModel::ScaledIid {
            dist: BaseDistribution::Normal,
            scale: ScaleRule::InvSqrtBandwidth { alpha: 0.5 },
        })
        .with_profile(VarianceProfile::Continuous {
            sigma: ProfileFn::identity(),
        })
        .with_truncation(Truncation::Power { exponent: -0.3 });
        let json = serde_json::to_string(&model).unwrap();
        let back: EntryModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
        let typo = r#"{"base": {"family": "sparse_bernoulli", "lambda": 1, "lamda": 2}}"#;
        assert!(serde_json::from_str::<EntryModel>(typo).is_err());
    }
}
