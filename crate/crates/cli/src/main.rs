use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use patspec::asymptotics::{count_pi_exact, pi_limit, McConfig, PiCountResult};
use patspec::combin::{class_counts, Word};
use patspec::harness::{
    build_report, exit, exit_code, parse_mask, parse_model, simulate, theoretical_moments,
    theory_moments, ExperimentConfig,
};
use patspec::{Error, LinkPattern, MaskKind, MeanSe, Result};

#[derive(Parser)]
#[command(
    name = "patspec",
    version,
    about = "Spectral moments of patterned random matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limiting moments β_1..β_K for a pattern and entry model.
    LimitMoments {
        #[arg(long)]
        pattern: LinkPattern,
        #[arg(long)]
        model: String,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "none")]
        mask: MaskKind,
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replicated empirical moments (1/n) Tr(A^k).
    Simulate {
        #[arg(long)]
        pattern: LinkPattern,
        #[arg(long)]
        model: String,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "none")]
        mask: MaskKind,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        replicates: usize,
        #[arg(long)]
        kmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Histogram of pooled eigenvalues at the largest n.
        #[arg(long)]
        hist: Option<PathBuf>,
        #[arg(long, default_value_t = 101)]
        bins: usize,
    },
    /// Theory against simulation for a JSON experiment config.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exact circuit count for a word.
    CountPi {
        #[arg(long)]
        word: String,
        #[arg(long)]
        pattern: LinkPattern,
        #[arg(long)]
        n: usize,
        /// Also estimate the n → ∞ limit of the normalized count.
        #[arg(long)]
        limit: bool,
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Even and symmetric partition counts of [k].
    ClassifyPartitions {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Serialize)]
struct CountPiReport {
    #[serde(flatten)]
    count: PiCountResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalized_word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit: Option<MeanSe>,
}

fn mc_config(samples: Option<u64>, seed: u64) -> McConfig {
    let mc = McConfig::default().with_seed(seed);
    match samples {
        Some(s) => mc.with_samples(s),
        None => mc,
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn write_csv_file(hist: &patspec::spectra::Histogram, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    hist.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::LimitMoments {
            pattern,
            model,
            lambda,
            alpha,
            mask,
            kmax,
            mc_samples,
            seed,
            out,
        } => {
            let entries = parse_model(&model, lambda, alpha)?;
            let mask = parse_mask(mask, alpha)?;
            let reports =
                theory_moments(pattern, &mask, &entries, kmax, &mc_config(mc_samples, seed))?;
            write_json(&reports, out.as_deref())?;
        }
        Command::Simulate {
            pattern,
            model,
            lambda,
            alpha,
            mask,
            n,
            replicates,
            kmax,
            seed,
            out,
            hist,
            bins,
        } => {
            let entries = parse_model(&model, lambda, alpha)?;
            let mut cfg = ExperimentConfig::new(pattern, entries, n, replicates, kmax, seed)
                .with_mask(parse_mask(mask, alpha)?);
            cfg.output.bins = bins;
            let (moments, h) = simulate(&cfg, hist.is_some())?;
            if let (Some(path), Some(h)) = (hist.as_deref(), h) {
                write_csv_file(&h, path)?;
            }
            write_json(&moments, out.as_deref())?;
        }
        Command::Compare { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::from_json(&text)?;
            if cfg.replicates < 2 {
                return Err(Error::Config(
                    "comparisons need at least 2 replicates for a standard error".into(),
                ));
            }
            let theory = theoretical_moments(&cfg)?;
            let (empirical, hist) = simulate(&cfg, cfg.output.histogram.is_some())?;
            if let (Some(path), Some(h)) = (cfg.output.histogram.as_deref(), hist) {
                write_csv_file(&h, path)?;
            }
            let report = build_report(&cfg, &theory, &empirical);
            write_json(&report, cfg.output.report.as_deref())?;
            if !report.pass {
                eprintln!("comparison failed: max |z| = {:.3}", report.max_abs_z);
                return Ok(exit::COMPARISON_FAILED);
            }
        }
        Command::CountPi {
            word,
            pattern,
            n,
            limit,
            mc_samples,
            seed,
        } => {
            let parsed = Word::parse(&word)?;
            let count = count_pi_exact(&parsed.word, pattern, n)?;
            let limit = if limit {
                Some(pi_limit(
                    &parsed.word,
                    pattern,
                    &mc_config(mc_samples, seed),
                )?)
            } else {
                None
            };
            let report = CountPiReport {
                count,
                normalized_word: parsed.normalized.then(|| parsed.word.to_string()),
                limit,
            };
            write_json(&report, None)?;
        }
        Command::ClassifyPartitions { k } => {
            write_json(&class_counts(k)?, None)?;
        }
    }
    Ok(exit::PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
