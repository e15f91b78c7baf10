//! Chooses the limiting-moment formula for a pattern, entry model and mask.
//!
//! | pattern | entries | masks | formula |
//! |---|---|---|---|
//! | rc | iid, sparse | none | sum over symmetric partitions of `C_σ` |
//! | rc | any, continuous σ | none, band I/II | profile moments with `α_s = ∫ σ_eff^s` |
//! | rc | discrete σ | none | profile moments with period averages |
//! | sc | iid, sparse | none | sum over even partitions of `a_σ C_σ` |
//! | sc | any, continuous σ | none, band I | profile moments with `δ_s = 2∫_0^{1/2} σ_eff^s` |
//! | sc | discrete σ | none | profile moments with period averages |
//! | toeplitz, hankel | any, continuous σ | none, band I/II, triangular | Monte Carlo word integrals |
//!
//! Everything else is reported as unsupported.

use serde_json::json;

use crate::asymptotics::{
    band_toeplitz_hankel_moment, profile_limit_moment, rc_limit_moment, sc_limit_moment, Kernel,
    KernelWeight, LimitMomentReport, McConfig,
};
use crate::entries::{limit_constants, EntryModel, ProfileFn, VarianceProfile};
use crate::error::{Error, Result};
use crate::patterns::{LinkPattern, MaskKind, MaskSpec};

fn merge(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// `α_s` for `s = 1..=kmax`: power integrals of `σ` over the part of the
/// link-argument domain the pattern uses and the mask keeps.
fn circulant_alphas(
    pattern: LinkPattern,
    mask: &MaskSpec,
    profile: &VarianceProfile,
    kmax: usize,
) -> Result<Vec<f64>> {
    let domain_hi = match pattern {
        LinkPattern::ReverseCirculant => 1.0,
        _ => 0.5,
    };
    if let VarianceProfile::Discrete { sigma } = profile {
        if mask.kind != MaskKind::None {
            return Err(Error::Unsupported(
                "discrete variance profiles are only supported without masks".into(),
            ));
        }
        return Ok((1..=kmax)
            .map(|s| {
                let mean =
                    sigma.iter().map(|v| v.abs().powi(s as i32)).sum::<f64>() / sigma.len() as f64;
                mean * domain_hi
            })
            .collect());
    }
    let support = mask.limit_support(pattern).ok_or_else(|| {
        Error::Unsupported(format!("no closed-form moments for triangular {pattern}"))
    })?;
    let support = merge(
        support
            .into_iter()
            .map(|(lo, hi)| (lo.max(0.0), hi.min(domain_hi)))
            .filter(|(lo, hi)| lo < hi)
            .collect(),
    );
    let sigma = match profile {
        VarianceProfile::Continuous { sigma } => sigma.clone(),
        _ => ProfileFn::constant(1.0),
    };
    Ok((1..=kmax)
        .map(|s| {
            support
                .iter()
                .map(|&(lo, hi)| sigma.integral_pow(lo, hi, s as u32).value)
                .sum()
        })
        .collect())
}

/// Theoretical `β_k` for `k = 1..=kmax`.
pub fn theory_moments(
    pattern: LinkPattern,
    mask: &MaskSpec,
    entries: &EntryModel,
    kmax: usize,
    mc: &McConfig,
) -> Result<Vec<LimitMomentReport>> {
    mask.validate(pattern)?;
    entries.profile.validate()?;
    let c = limit_constants(entries, kmax)?;
    let plain = mask.kind == MaskKind::None && entries.profile == VarianceProfile::None;
    let echo = json!({
        "pattern": pattern,
        "mask": mask,
        "base": entries.base,
        "profile": entries.profile,
        "limit_constants": c,
    });
    let mut out = Vec::with_capacity(kmax);
    match pattern {
        LinkPattern::ReverseCirculant | LinkPattern::SymmetricCirculant => {
            if pattern == LinkPattern::SymmetricCirculant && mask.kind == MaskKind::Triangular {
                return Err(Error::Unsupported(
                    "no closed-form moments for the triangular symmetric circulant".into(),
                ));
            }
            let alphas = if plain {
                None
            } else {
                Some(circulant_alphas(pattern, mask, &entries.profile, kmax)?)
            };
            for k in 1..=kmax {
                let r = match (&alphas, pattern) {
                    (None, LinkPattern::ReverseCirculant) => rc_limit_moment(&c, k)?,
                    (None, _) => sc_limit_moment(&c, k)?,
                    (Some(a), _) => profile_limit_moment(pattern, a, &c, k)?,
                };
                out.push(r.with_config(echo.clone()));
            }
        }
        LinkPattern::Toeplitz | LinkPattern::Hankel => {
            let sigma = match &entries.profile {
                VarianceProfile::None => None,
                VarianceProfile::Continuous { sigma } => Some(sigma.clone()),
                VarianceProfile::Discrete { .. } => {
                    return Err(Error::Unsupported(format!(
                        "discrete variance profiles have no {pattern} limit formula"
                    )))
                }
            };
            let triangular = mask.kind == MaskKind::Triangular;
            let kernel = Kernel::General {
                weight: KernelWeight {
                    c: c.clone(),
                    sigma,
                    support: if triangular {
                        None
                    } else {
                        mask.limit_support(pattern)
                    },
                },
                triangular,
            };
            for k in 1..=kmax {
                let r = band_toeplitz_hankel_moment(pattern, &kernel, &c, k, mc)?;
                out.push(r.with_config(echo.clone()));
            }
        }
    }
    Ok(out)
}
