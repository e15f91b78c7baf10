//! Replicated simulation, theory-versus-simulation comparison and the
//! truncation diagnostic.

mod config;
mod theory;

pub use config::{parse_mask, parse_model, ExperimentConfig, MatrixTemplate, OutputPaths};
pub use theory::theory_moments;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::LimitMomentReport;
use crate::entries::{sample_inputs, truncation_residual};
use crate::error::{Error, Result};
use crate::rng::{stream, stream_id, Domain};
use crate::spectra::{esd_histogram, spectrum, trace_moments, Histogram};
use crate::stats::{z_score, MeanSe};

/// Process exit codes used by the command-line tool.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const COMPARISON_FAILED: i32 = 2;
    pub const CAPACITY: i32 = 3;
    pub const CONFIG: i32 = 4;
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Capacity { .. } => exit::CAPACITY,
        Error::Argument(_)
        | Error::Config(_)
        | Error::Range(_)
        | Error::Unsupported(_)
        | Error::Json(_) => exit::CONFIG,
        _ => exit::FAILURE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub k: usize,
    pub mean: f64,
    pub se: f64,
    /// Spread of `(1/n) Tr(A^k)` across replicates.
    pub replicate_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsAtN {
    pub n: usize,
    pub replicates: usize,
    pub moments: Vec<MomentEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMoments {
    pub per_n: Vec<MomentsAtN>,
}

/// Per-replicate trace moments at one `n`, in replicate order, plus the
/// eigenvalues when `keep_eigs` is set.
fn replicates_at(
    cfg: &ExperimentConfig,
    n: usize,
    keep_eigs: bool,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let spec = cfg.matrix.at(n);
    let runs: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let run = || -> Result<(Vec<f64>, Vec<f64>)> {
                let mut rng = stream(cfg.seed, stream_id(Domain::Entries, n as u64, r as u64));
                let x = sample_inputs(&cfg.entries, spec.pattern, n, &mut rng)?;
                let eigs = spectrum(&spec, &x, cfg.solver)?;
                let m = trace_moments(&eigs, cfg.kmax);
                Ok((m, if keep_eigs { eigs } else { Vec::new() }))
            };
            run().map_err(|e| Error::AtReplicate {
                n,
                replicate: r,
                source: Box::new(e),
            })
        })
        .collect();
    let mut moments = Vec::with_capacity(cfg.replicates);
    let mut eigs = Vec::new();
    for run in runs {
        let (m, e) = run?;
        moments.push(m);
        eigs.extend(e);
    }
    Ok((moments, eigs))
}

fn summarize(n: usize, kmax: usize, per_rep: &[Vec<f64>]) -> MomentsAtN {
    let moments = (1..=kmax)
        .map(|k| {
            let mut acc = MeanSe::accumulator();
            per_rep.iter().for_each(|m| acc.push(m[k - 1]));
            let est = acc.finish();
            MomentEstimate {
                k,
                mean: est.mean,
                se: est.se,
                replicate_sd: acc.sd(),
            }
        })
        .collect();
    MomentsAtN {
        n,
        replicates: per_rep.len(),
        moments,
    }
}

/// Means and standard errors of `(1/n) Tr(A^k)` over independent replicates.
pub fn estimate_moments(cfg: &ExperimentConfig) -> Result<EmpiricalMoments> {
    Ok(simulate(cfg, false)?.0)
}

/// Like [`estimate_moments`], optionally also histogramming the pooled
/// eigenvalues at the largest `n`.
pub fn simulate(
    cfg: &ExperimentConfig,
    with_histogram: bool,
) -> Result<(EmpiricalMoments, Option<Histogram>)> {
    cfg.validate()?;
    let largest = *cfg.n.iter().max().expect("validated");
    let mut per_n = Vec::with_capacity(cfg.n.len());
    let mut hist = None;
    for &n in &cfg.n {
        let keep = with_histogram && n == largest && hist.is_none();
        let (per_rep, eigs) = replicates_at(cfg, n, keep)?;
        per_n.push(summarize(n, cfg.kmax, &per_rep));
        if keep {
            hist = Some(esd_histogram(&eigs, cfg.output.bins, None)?);
        }
    }
    Ok((EmpiricalMoments { per_n }, hist))
}

pub fn theoretical_moments(cfg: &ExperimentConfig) -> Result<Vec<LimitMomentReport>> {
    theory_moments(
        cfg.matrix.pattern,
        &cfg.matrix.mask,
        &cfg.entries,
        cfg.kmax,
        &cfg.mc,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub k: usize,
    pub theory: f64,
    pub theory_se: f64,
    pub empirical: f64,
    pub empirical_se: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ComparisonRow>,
    pub max_abs_z: f64,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn row(&self, n: usize, k: usize) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.n == n && r.k == k)
    }
}

/// Compares replicated empirical moments with the limiting moments.
pub fn compare(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    if cfg.replicates < 2 {
        return Err(Error::Config(
            "comparisons need at least 2 replicates for a standard error".into(),
        ));
    }
    let theory = theoretical_moments(cfg)?;
    let empirical = estimate_moments(cfg)?;
    Ok(build_report(cfg, &theory, &empirical))
}

pub fn build_report(
    cfg: &ExperimentConfig,
    theory: &[LimitMomentReport],
    empirical: &EmpiricalMoments,
) -> ComparisonReport {
    let mut rows = Vec::new();
    for at in &empirical.per_n {
        for m in &at.moments {
            let t = theory[m.k - 1].estimate();
            let e = MeanSe {
                mean: m.mean,
                se: m.se,
                count: at.replicates as u64,
            };
            let z = z_score(e, t);
            rows.push(ComparisonRow {
                n: at.n,
                k: m.k,
                theory: t.mean,
                theory_se: t.se,
                empirical: m.mean,
                empirical_se: m.se,
                z,
                pass: z.abs() <= cfg.z_cap,
            });
        }
    }
    let max_abs_z = rows.iter().fold(0.0f64, |a, r| a.max(r.z.abs()));
    let pass = rows.iter().all(|r| r.pass);
    ComparisonReport {
        config: cfg.clone(),
        rows,
        max_abs_z,
        pass,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationVerdict {
    Pass,
    NonVanishingSuspect,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationRow {
    pub n: usize,
    pub level: f64,
    pub residual: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub rows: Vec<TruncationRow>,
    pub verdict: TruncationVerdict,
}

/// `Σ_i E[x_i² 1{|x_i| > t_n}]` across the `n` list (ascending). The
/// sequence is flagged unless it is identically zero, ends significantly
/// (three combined standard errors) below where it starts, or ends within
/// three standard errors of zero. Diagnostic only.
pub fn truncation_check(cfg: &ExperimentConfig, samples: usize) -> Result<TruncationReport> {
    cfg.validate()?;
    let mut ns = cfg.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let mut rng = stream(cfg.seed, stream_id(Domain::Truncation, n as u64, 0));
        let est = truncation_residual(&cfg.entries, n, samples, &mut rng)?;
        rows.push(TruncationRow {
            n,
            level: cfg.entries.truncation.level(n),
            residual: est.mean,
            se: est.se,
        });
    }
    let first = rows.first().expect("validated");
    let last = rows.last().expect("validated");
    let ok = rows.iter().all(|r| r.residual == 0.0)
        || (rows.len() > 1 && first.residual - last.residual > 3.0 * first.se.hypot(last.se))
        || last.residual <= 3.0 * last.se;
    Ok(TruncationReport {
        verdict: if ok {
            TruncationVerdict::Pass
        } else {
            TruncationVerdict::NonVanishingSuspect
        },
        rows,
    })
}
