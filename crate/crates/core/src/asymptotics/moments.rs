//! Limiting moments `β_k` of the four patterns.

use rayon::prelude::*;
use serde::Serialize;

use super::integral::{sign_sets, term_estimate, BlockWeight, KernelWeight, McConfig, UnitWeight};
use crate::combin::{
    a_coefficient, binomial, classify, enumerate_partitions, partition_of, word_of, Class,
    Partition, Word,
};
use crate::entries::{MomentProfile, ProfileFn};
use crate::error::{Error, Result};
use crate::patterns::LinkPattern;
use crate::rng::{stream, stream_id, Domain};
use crate::stats::MeanSe;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionTerm {
    pub word: String,
    pub block_sizes: Vec<usize>,
    pub value: f64,
    pub std_err: f64,
    /// Number of Monte Carlo sign sets behind this term (0 for closed forms).
    pub sign_sets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitMomentReport {
    pub pattern: LinkPattern,
    pub k: usize,
    pub beta: f64,
    pub mc_std_err: f64,
    pub terms: Vec<PartitionTerm>,
    pub config: serde_json::Value,
}

impl LimitMomentReport {
    fn zero(pattern: LinkPattern, k: usize) -> Self {
        LimitMomentReport {
            pattern,
            k,
            beta: 0.0,
            mc_std_err: 0.0,
            terms: Vec::new(),
            config: serde_json::Value::Null,
        }
    }

    fn from_terms(pattern: LinkPattern, k: usize, terms: Vec<PartitionTerm>) -> Self {
        let total = MeanSe::sum(terms.iter().map(|t| MeanSe {
            mean: t.value,
            se: t.std_err,
            count: 0,
        }));
        LimitMomentReport {
            pattern,
            k,
            beta: total.mean,
            mc_std_err: total.se,
            terms,
            config: serde_json::Value::Null,
        }
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = config;
        self
    }

    pub fn estimate(&self) -> MeanSe {
        MeanSe {
            mean: self.beta,
            se: self.mc_std_err,
            count: 0,
        }
    }
}

fn seq_value(seq: &[f64], s: usize, name: &str) -> Result<f64> {
    seq.get(s - 1).copied().ok_or_else(|| {
        Error::Range(format!(
            "{name}_{s} needed but only {} values supplied",
            seq.len()
        ))
    })
}

/// Closed-form sum over the partitions of `[k]` in the class selected by
/// `keep`, with per-block weight `block(size)`.
fn closed_form<F, K>(pattern: LinkPattern, k: usize, keep: K, block: F) -> Result<LimitMomentReport>
where
    K: Fn(Class) -> bool,
    F: Fn(usize) -> Result<f64>,
{
    let mut terms = Vec::new();
    for p in enumerate_partitions(k)? {
        if !keep(classify(&p)) {
            continue;
        }
        let sizes = p.block_sizes();
        let mut value = 1.0;
        for &s in &sizes {
            value *= block(s)?;
        }
        terms.push(PartitionTerm {
            word: word_of(&p)?.to_string(),
            block_sizes: sizes,
            value,
            std_err: 0.0,
            sign_sets: 0,
        });
    }
    Ok(LimitMomentReport::from_terms(pattern, k, terms))
}

/// `β_k = Σ_{σ ∈ S(k)} C_σ` for reverse circulant; `c[s - 1] = C_s`.
pub fn rc_limit_moment(c: &[f64], k: usize) -> Result<LimitMomentReport> {
    if k % 2 == 1 {
        enumerate_partitions(k)?;
        return Ok(LimitMomentReport::zero(LinkPattern::ReverseCirculant, k));
    }
    closed_form(
        LinkPattern::ReverseCirculant,
        k,
        |c| c.symmetric,
        |s| seq_value(c, s, "C"),
    )
}

/// `β_k = Σ_{σ ∈ E(k)} a_σ C_σ` for symmetric circulant.
pub fn sc_limit_moment(c: &[f64], k: usize) -> Result<LimitMomentReport> {
    if k % 2 == 1 {
        enumerate_partitions(k)?;
        return Ok(LimitMomentReport::zero(LinkPattern::SymmetricCirculant, k));
    }
    closed_form(
        LinkPattern::SymmetricCirculant,
        k,
        |c| c.even,
        |s| Ok(a_coefficient(s)? * seq_value(c, s, "C")?),
    )
}

/// Variance-profile moments: `Σ_{S(k)} α_π C_π` for reverse circulant and
/// `Σ_{E(k)} a_π δ_π C_π` with `δ_s = 2α_s` for symmetric circulant.
/// `alpha[s - 1] = α_s`, the limit of `(1/n) Σ σ_i^s` over the input
/// indices actually used by the pattern.
pub fn profile_limit_moment(
    pattern: LinkPattern,
    alpha: &[f64],
    c: &[f64],
    k: usize,
) -> Result<LimitMomentReport> {
    if k % 2 == 1 {
        enumerate_partitions(k)?;
        return Ok(LimitMomentReport::zero(pattern, k));
    }
    match pattern {
        LinkPattern::ReverseCirculant => closed_form(
            pattern,
            k,
            |c| c.symmetric,
            |s| Ok(seq_value(alpha, s, "alpha")? * seq_value(c, s, "C")?),
        ),
        LinkPattern::SymmetricCirculant => closed_form(
            pattern,
            k,
            |c| c.even,
            |s| Ok(a_coefficient(s)? * 2.0 * seq_value(alpha, s, "alpha")? * seq_value(c, s, "C")?),
        ),
        other => Err(Error::Unsupported(format!(
            "closed-form profile moments exist for rc and sc, not {other}"
        ))),
    }
}

/// Sum of Monte Carlo word integrals over even (Toeplitz) or symmetric
/// (Hankel) partitions of `[k]`.
fn integral_moment<W: BlockWeight + ?Sized>(
    pattern: LinkPattern,
    k: usize,
    weight: &W,
    triangular: bool,
    mc: &McConfig,
) -> Result<LimitMomentReport> {
    let partitions = enumerate_partitions(k)?;
    if k % 2 == 1 {
        return Ok(LimitMomentReport::zero(pattern, k));
    }
    if mc.samples < 2 {
        return Err(Error::Config(
            "Monte Carlo needs at least 2 samples per term".into(),
        ));
    }
    let toeplitz = match pattern {
        LinkPattern::Toeplitz => true,
        LinkPattern::Hankel => false,
        other => {
            return Err(Error::Unsupported(format!(
                "word integrals are used for toeplitz and hankel, not {other}"
            )))
        }
    };
    // (partition index, word, sizes, sign sets)
    let mut jobs: Vec<(usize, Word, Vec<usize>, Vec<Vec<i8>>)> = Vec::new();
    for (idx, p) in partitions.enumerate() {
        let class = classify(&p);
        let keep = if toeplitz {
            class.even
        } else {
            class.symmetric
        };
        if !keep {
            continue;
        }
        let sizes = p.block_sizes();
        if sizes.iter().any(|&s| weight.vanishes(s)) {
            continue;
        }
        let w = word_of(&p)?;
        let sets = if toeplitz {
            sign_sets(&w, mc.max_sign_sets)?
        } else {
            vec![vec![1i8; k]]
        };
        jobs.push((idx, w, sizes, sets));
    }
    let flat: Vec<(usize, usize, usize)> = jobs
        .iter()
        .enumerate()
        .flat_map(|(j, job)| (0..job.3.len()).map(move |s| (j, s, job.0)))
        .collect();
    let estimates: Vec<MeanSe> = flat
        .par_iter()
        .map(|&(j, s, idx)| {
            let mut rng = stream(mc.seed, stream_id(Domain::Integral, idx as u64, s as u64));
            term_estimate(
                pattern,
                &jobs[j].1,
                jobs[j].3[s].clone(),
                weight,
                triangular,
                mc.samples,
                &mut rng,
            )
        })
        .collect();
    let mut terms: Vec<PartitionTerm> = jobs
        .iter()
        .map(|(_, w, sizes, sets)| PartitionTerm {
            word: w.to_string(),
            block_sizes: sizes.clone(),
            value: 0.0,
            std_err: 0.0,
            sign_sets: sets.len(),
        })
        .collect();
    let mut var = vec![0.0; jobs.len()];
    for (&(j, _, _), est) in flat.iter().zip(&estimates) {
        terms[j].value += est.mean;
        var[j] += est.se * est.se;
    }
    for (t, v) in terms.iter_mut().zip(var) {
        t.std_err = v.sqrt();
    }
    Ok(LimitMomentReport::from_terms(pattern, k, terms))
}

fn check_profile(g: &MomentProfile, k: usize, domain: (f64, f64)) -> Result<()> {
    g.validate()?;
    if k % 2 == 0 && g.kmax() < k {
        return Err(Error::Range(format!(
            "moment {k} needs g up to g_{k}, profile stops at g_{}",
            g.kmax()
        )));
    }
    if g.domain != domain {
        return Err(Error::Config(format!(
            "profile domain {:?} does not match the pattern's {:?}",
            g.domain, domain
        )));
    }
    Ok(())
}

/// Toeplitz `β_k`: even partitions, every balanced sign set, integrand
/// `∏ g_{k_j}(|u_j|)`.
pub fn toeplitz_limit_moment(
    g: &MomentProfile,
    k: usize,
    mc: &McConfig,
) -> Result<LimitMomentReport> {
    check_profile(g, k, LinkPattern::Toeplitz.profile_domain())?;
    integral_moment(LinkPattern::Toeplitz, k, g, false, mc)
}

/// Hankel `β_k`: symmetric partitions, integrand `∏ g_{k_j}(p_j)` with `p_j`
/// on `[0, 2]`.
pub fn hankel_limit_moment(
    g: &MomentProfile,
    k: usize,
    mc: &McConfig,
) -> Result<LimitMomentReport> {
    check_profile(g, k, LinkPattern::Hankel.profile_domain())?;
    integral_moment(LinkPattern::Hankel, k, g, false, mc)
}

/// Kernels multiplying the Toeplitz and Hankel integrands.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// Link argument at most `alpha`.
    BandI { alpha: f64 },
    /// Link argument in `[0, α] ∪ [1-α, 1]` (Toeplitz) or `[1-α, 1+α]` (Hankel).
    BandII { alpha: f64 },
    /// `η(x, y) = 1[x + y ≤ 1]` on every edge.
    Triangular,
    /// A general kernel: `C_s σ(arg)^s` on a support, optionally triangular.
    General {
        weight: KernelWeight,
        triangular: bool,
    },
}

/// Toeplitz or Hankel moments with a band or triangular kernel and limit
/// constants `c[s - 1] = C_s`.
pub fn band_toeplitz_hankel_moment(
    pattern: LinkPattern,
    kernel: &Kernel,
    c: &[f64],
    k: usize,
    mc: &McConfig,
) -> Result<LimitMomentReport> {
    if k % 2 == 0 && c.len() < k {
        return Err(Error::Range(format!(
            "moment {k} needs C_1..C_{k}, got {} values",
            c.len()
        )));
    }
    let (weight, triangular) = match kernel {
        Kernel::BandI { alpha } | Kernel::BandII { alpha } if !(*alpha > 0.0 && *alpha <= 1.0) => {
            return Err(Error::Config(format!(
                "band ratio must lie in (0, 1], got {alpha}"
            )))
        }
        Kernel::BandI { alpha } => (
            KernelWeight {
                c: c.to_vec(),
                sigma: None,
                support: Some(vec![(0.0, *alpha)]),
            },
            false,
        ),
        Kernel::BandII { alpha } => {
            let support = match pattern {
                LinkPattern::Hankel => vec![(1.0 - alpha, 1.0 + alpha)],
                _ => vec![(0.0, *alpha), (1.0 - alpha, 1.0)],
            };
            (
                KernelWeight {
                    c: c.to_vec(),
                    sigma: None,
                    support: Some(support),
                },
                false,
            )
        }
        Kernel::Triangular => (KernelWeight::constants(c.to_vec()), true),
        Kernel::General { weight, triangular } => {
            let mut w = weight.clone();
            w.c = c.to_vec();
            (w, *triangular)
        }
    };
    if let Some(sigma) = &weight.sigma {
        sigma.validate()?;
    }
    integral_moment(pattern, k, &weight, triangular, mc)
}

/// `α(ω) = lim |Π(ω)| / n^{b+1}` with its Monte Carlo standard error.
pub fn pi_limit(w: &Word, pattern: LinkPattern, mc: &McConfig) -> Result<MeanSe> {
    let p: Partition = partition_of(w);
    let sizes = p.block_sizes();
    if sizes.iter().any(|&s| s < 2) {
        return Ok(MeanSe::exact(0.0));
    }
    let class = classify(&p);
    match pattern {
        LinkPattern::ReverseCirculant => Ok(MeanSe::exact(if class.symmetric { 1.0 } else { 0.0 })),
        LinkPattern::SymmetricCirculant => {
            if !class.even {
                return Ok(MeanSe::exact(0.0));
            }
            let mut prod = 1.0;
            for &s in &sizes {
                prod *= binomial(s as u64 - 1, s as u64 / 2)? as f64;
            }
            Ok(MeanSe::exact(prod))
        }
        LinkPattern::Toeplitz | LinkPattern::Hankel => {
            let keep = if pattern == LinkPattern::Toeplitz {
                class.even
            } else {
                class.symmetric
            };
            if !keep {
                return Ok(MeanSe::exact(0.0));
            }
            let sets = if pattern == LinkPattern::Toeplitz {
                sign_sets(w, mc.max_sign_sets)?
            } else {
                vec![vec![1i8; w.len()]]
            };
            let parts: Vec<MeanSe> = sets
                .into_par_iter()
                .enumerate()
                .map(|(s, signs)| {
                    let mut rng = stream(mc.seed, stream_id(Domain::Integral, 0, s as u64));
                    term_estimate(pattern, w, signs, &UnitWeight, false, mc.samples, &mut rng)
                })
                .collect();
            Ok(MeanSe::sum(parts))
        }
    }
}

/// Constant `g_{2m} ≡ c[2m - 1]` profile on the pattern's domain.
pub fn constant_profile(c: &[f64], pattern: LinkPattern) -> MomentProfile {
    MomentProfile::from_constants(c, pattern.profile_domain())
}

/// `g_{2m}(x) = C_{2m} σ(x)^{2m}` on the pattern's domain.
pub fn sigma_profile(c: &[f64], sigma: &ProfileFn, pattern: LinkPattern) -> MomentProfile {
    let g = c
        .iter()
        .enumerate()
        .skip(1)
        .step_by(2)
        .map(|(i, &ci)| {
            let s = i + 1;
            match sigma {
                ProfileFn::Polynomial { coeffs } => {
                    let mut power = vec![ci];
                    for _ in 0..s {
                        let mut next = vec![0.0; power.len() + coeffs.len() - 1];
                        for (a, &x) in power.iter().enumerate() {
                            for (b, &y) in coeffs.iter().enumerate() {
                                next[a + b] += x * y;
                            }
                        }
                        power = next;
                    }
                    ProfileFn::Polynomial { coeffs: power }
                }
                ProfileFn::Constant { value } => ProfileFn::constant(ci * value.powi(s as i32)),
                _ => ProfileFn::Tabulated {
                    xs: grid(pattern),
                    ys: grid(pattern)
                        .into_iter()
                        .map(|x| ci * sigma.eval(x).powi(s as i32))
                        .collect(),
                },
            }
        })
        .collect();
    MomentProfile {
        g,
        domain: pattern.profile_domain(),
    }
}

fn grid(pattern: LinkPattern) -> Vec<f64> {
    let (lo, hi) = pattern.profile_domain();
    let g = crate::entries::QUADRATURE_PANELS;
    (0..=g)
        .map(|j| lo + (hi - lo) * j as f64 / g as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const IID: [f64; 10] = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn mc(samples: u64) -> McConfig {
        McConfig::default().with_samples(samples).with_seed(17)
    }

    #[test]
    fn rc_examples() {
        assert_eq!(rc_limit_moment(&IID, 4).unwrap().beta, 2.0);
        let lambda = 3.0;
        let r = rc_limit_moment(&[lambda; 4], 4).unwrap();
        assert_eq!(r.beta, 2.0 * lambda * lambda + lambda);
        assert_eq!(r.terms.len(), 3);
        assert_eq!(rc_limit_moment(&[1.0; 3], 3).unwrap().beta, 0.0);
        assert!(rc_limit_moment(&IID, 12).is_err());
        assert!(matches!(
            rc_limit_moment(&[0.0, 1.0], 4),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn sc_examples() {
        assert_eq!(sc_limit_moment(&IID, 4).unwrap().beta, 3.0);
        assert_eq!(sc_limit_moment(&IID, 6).unwrap().beta, 15.0);
        assert_eq!(sc_limit_moment(&[1.0; 4], 4).unwrap().beta, 6.0);
    }

    #[test]
    fn closed_forms_match_class_counts() {
        let mut fact = 1.0;
        let mut dfact = 1.0;
        for k in 1..=5usize {
            fact *= k as f64;
            dfact *= (2 * k - 1) as f64;
            let counts = crate::combin::class_counts(2 * k).unwrap();
            let rc = rc_limit_moment(&IID, 2 * k).unwrap().beta;
            let sc = sc_limit_moment(&IID, 2 * k).unwrap().beta;
            assert_eq!(rc, fact);
            assert_eq!(rc, counts.symmetric_by_blocks[k] as f64);
            assert_eq!(sc, dfact);
            assert_eq!(sc, counts.even_by_blocks[k] as f64);
        }
    }

    #[test]
    fn profile_examples() {
        let rc = LinkPattern::ReverseCirculant;
        let sc = LinkPattern::SymmetricCirculant;
        // σ(x) = x: α_2 = 1/3, α_4 = 1/5.
        let alpha = [0.0, 1.0 / 3.0, 0.0, 0.2];
        let r = profile_limit_moment(rc, &alpha, &IID, 4).unwrap();
        assert!((r.beta - 2.0 / 9.0).abs() < 1e-15);
        // Half band with C_2 = 2 reproduces the full reverse circulant.
        let band = [0.5; 4];
        let r = profile_limit_moment(rc, &band, &[0.0, 2.0, 0.0, 0.0], 4).unwrap();
        assert!((r.beta - 2.0).abs() < 1e-15);
        let r = profile_limit_moment(sc, &[0.0, 0.3], &[0.0, 1.7], 2).unwrap();
        assert!((r.beta - 2.0 * 0.3 * 1.7).abs() < 1e-15);
        assert!(profile_limit_moment(LinkPattern::Hankel, &band, &IID, 2).is_err());
    }

    #[test]
    fn pi_limit_closed_forms() {
        let m = mc(1000);
        let rc = pi_limit(&word("abba"), LinkPattern::ReverseCirculant, &m).unwrap();
        assert_eq!((rc.mean, rc.se), (1.0, 0.0));
        assert_eq!(
            pi_limit(&word("abab"), LinkPattern::ReverseCirculant, &m)
                .unwrap()
                .mean,
            0.0
        );
        assert_eq!(
            pi_limit(&word("aaaa"), LinkPattern::SymmetricCirculant, &m)
                .unwrap()
                .mean,
            3.0
        );
        assert_eq!(
            pi_limit(&word("aab"), LinkPattern::Toeplitz, &m)
                .unwrap()
                .mean,
            0.0
        );
        assert_eq!(
            pi_limit(&word("abab"), LinkPattern::Hankel, &m)
                .unwrap()
                .mean,
            0.0
        );
    }

    #[test]
    fn pi_limit_monte_carlo() {
        let m = mc(200_000);
        let t = pi_limit(&word("abab"), LinkPattern::Toeplitz, &m).unwrap();
        assert!((t.mean - 2.0 / 3.0).abs() < 4.0 * t.se);
        let h = pi_limit(&word("aabb"), LinkPattern::Hankel, &m).unwrap();
        assert_eq!(h.mean, 1.0);
        for s in ["abcabc", "abccba", "aabbcc", "abcacb"] {
            let h = pi_limit(&word(s), LinkPattern::Hankel, &m).unwrap();
            assert!((0.0..=1.0).contains(&h.mean));
        }
    }

    #[test]
    fn toeplitz_and_hankel_fourth_moments() {
        let m = mc(300_000);
        let g = constant_profile(&IID[..4], LinkPattern::Toeplitz);
        let t = toeplitz_limit_moment(&g, 4, &m).unwrap();
        assert!(
            (t.beta - 8.0 / 3.0).abs() < 4.0 * t.mc_std_err,
            "{}",
            t.beta
        );
        assert_eq!(toeplitz_limit_moment(&g, 2, &m).unwrap().beta, 1.0);
        assert_eq!(toeplitz_limit_moment(&g, 3, &m).unwrap().beta, 0.0);

        let g = constant_profile(&IID[..4], LinkPattern::Hankel);
        let h = hankel_limit_moment(&g, 4, &m).unwrap();
        assert_eq!(h.beta, 2.0);
        assert_eq!(hankel_limit_moment(&g, 2, &m).unwrap().beta, 1.0);
    }

    #[test]
    fn kernels() {
        let m = mc(200_000);
        let c = [0.0, 1.3, 0.0, 0.0];
        let full = band_toeplitz_hankel_moment(
            LinkPattern::Toeplitz,
            &Kernel::BandI { alpha: 1.0 },
            &c,
            4,
            &m,
        )
        .unwrap();
        let plain =
            toeplitz_limit_moment(&constant_profile(&c, LinkPattern::Toeplitz), 4, &m).unwrap();
        assert_eq!(full.beta, plain.beta);

        let h = band_toeplitz_hankel_moment(
            LinkPattern::Hankel,
            &Kernel::BandII { alpha: 1.0 },
            &c,
            2,
            &m,
        )
        .unwrap();
        assert!((h.beta - 1.3).abs() < 1e-12);

        let tri = band_toeplitz_hankel_moment(
            LinkPattern::Hankel,
            &Kernel::Triangular,
            &[0.0, 1.0],
            2,
            &m,
        )
        .unwrap();
        assert!((tri.beta - 0.5).abs() < 4.0 * tri.mc_std_err);
    }

    #[test]
    fn sigma_profiles() {
        let p = sigma_profile(
            &[0.0, 2.0, 0.0, 5.0],
            &ProfileFn::identity(),
            LinkPattern::Toeplitz,
        );
        assert!((p.g(2).unwrap().eval(0.5) - 0.5).abs() < 1e-15);
        assert!((p.g(4).unwrap().eval(0.5) - 5.0 / 16.0).abs() < 1e-15);
        let tab = ProfileFn::Tabulated {
            xs: vec![0.0, 2.0],
            ys: vec![1.0, 0.0],
        };
        let p = sigma_profile(&[0.0, 1.0], &tab, LinkPattern::Hankel);
        assert!((p.g(2).unwrap().eval(1.0) - 0.25).abs() < 1e-12);
    }
}
