use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "bin_left,bin_right,mass";

/// Normalized eigenvalue histogram. `mass` plus the out-of-range masses
/// sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub mass: Vec<f64>,
    pub below: f64,
    pub above: f64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.below + self.above
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        let h = self.width();
        for (b, m) in self.mass.iter().enumerate() {
            let left = self.lo + b as f64 * h;
            writeln!(w, "{left},{},{m}", left + h)?;
        }
        Ok(())
    }
}

/// Histogram of `eigs` on `range`, defaulting to `[-L, L]` with
/// `L = 1.05·max|λ|`. Values equal to the right edge land in the last bin.
pub fn esd_histogram(eigs: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if eigs.is_empty() {
        return Err(Error::Argument("no eigenvalues to histogram".into()));
    }
    if bins == 0 {
        return Err(Error::Argument("need at least one bin".into()));
    }
    let (lo, hi) = match range {
        Some((lo, hi)) if lo < hi => (lo, hi),
        Some((lo, hi)) => {
            return Err(Error::Argument(format!(
                "empty histogram range [{lo}, {hi}]"
            )))
        }
        None => {
            let l = 1.05 * eigs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if l > 0.0 {
                (-l, l)
            } else {
                (-1.0, 1.0)
            }
        }
    };
    let w = 1.0 / eigs.len() as f64;
    let h = (hi - lo) / bins as f64;
    let mut mass = vec![0.0; bins];
    let (mut below, mut above) = (0.0, 0.0);
    for &v in eigs {
        if v < lo {
            below += w;
        } else if v > hi {
            above += w;
        } else {
            let b = (((v - lo) / h) as usize).min(bins - 1);
            mass[b] += w;
        }
    }
    Ok(Histogram {
        lo,
        hi,
        mass,
        below,
        above,
    })
}
