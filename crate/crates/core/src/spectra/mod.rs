//! Matrices built from sampled inputs, their eigenvalues, trace moments and
//! histograms.

mod eigen;
mod fast;
mod hist;
mod matrix;

pub use eigen::{eigenvalues_sym, DEFAULT_TOL};
pub use fast::{fast_path_available, masked_inputs, rc_eigenvalues_fast, sc_eigenvalues_fast};
pub use hist::{esd_histogram, Histogram, CSV_HEADER};
pub use matrix::{build_matrix, d2_bound, SymmetricMatrix, MAX_DIMENSION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::{LinkPattern, MatrixSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// FFT for circulant patterns when the mask keeps them circulant, dense otherwise.
    #[default]
    Auto,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// Entry `k - 1` holds `(1/n) Σ λ^k`.
    pub trace_moments: Vec<f64>,
}

/// Sorted eigenvalues of the matrix described by `spec` and `inputs`.
pub fn spectrum(spec: &MatrixSpec, inputs: &[f64], solver: Solver) -> Result<Vec<f64>> {
    let mask = spec.validate()?;
    if solver == Solver::Auto && fast_path_available(spec.pattern, &mask) {
        let x = masked_inputs(spec, inputs)?;
        return Ok(match spec.pattern {
            LinkPattern::ReverseCirculant => rc_eigenvalues_fast(&x),
            _ => sc_eigenvalues_fast(&x, spec.n)?,
        });
    }
    let m = build_matrix(spec, inputs)?;
    eigenvalues_sym(&m, DEFAULT_TOL)
}

pub fn spectrum_result(
    spec: &MatrixSpec,
    inputs: &[f64],
    solver: Solver,
    kmax: usize,
) -> Result<SpectrumResult> {
    let eigenvalues = spectrum(spec, inputs, solver)?;
    let trace_moments = trace_moments(&eigenvalues, kmax);
    Ok(SpectrumResult {
        eigenvalues,
        trace_moments,
    })
}

/// `(1/n) Σ λ^k` for `k = 1..=kmax`.
pub fn trace_moments(eigs: &[f64], kmax: usize) -> Vec<f64> {
    let n = eigs.len() as f64;
    let mut sums = vec![0.0; kmax];
    for &l in eigs {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= l;
            *s += p;
        }
    }
    sums.into_iter().map(|s| s / n).collect()
}

/// `(1/n) Tr(A^k)` via the eigenvalues. For `k = 2` the result is checked
/// against the Frobenius norm.
pub fn trace_moment(m: &SymmetricMatrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Argument("trace moments start at k = 1".into()));
    }
    let eigs = eigenvalues_sym(m, DEFAULT_TOL)?;
    let value = trace_moments(&eigs, k)[k - 1];
    if k == 2 {
        let frob = m.frobenius_sq() / m.n() as f64;
        if (value - frob).abs() > 1e-9 * frob.max(f64::MIN_POSITIVE) {
            return Err(Error::Numeric(format!(
                "second moment {value} disagrees with Frobenius norm {frob}"
            )));
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::MaskSpec;

    #[test]
    fn trace_moment_examples() {
        // Toeplitz with x_0 = 0 has zero diagonal.
        let spec = MatrixSpec::new(LinkPattern::Toeplitz, 6);
        let m = build_matrix(&spec, &[0.0, 1.0, -2.0, 0.5, 3.0, 1.0]).unwrap();
        assert!(trace_moment(&m, 1).unwrap().abs() < 1e-12);
        let m2 = trace_moment(&m, 2).unwrap();
        assert!((m2 - m.frobenius_sq() / 6.0).abs() < 1e-12);

        // Constant 1/√n inputs: n^2 entries of size 1/n over n.
        let n = 9;
        let spec = MatrixSpec::new(LinkPattern::ReverseCirculant, n);
        let m = build_matrix(&spec, &vec![1.0 / (n as f64).sqrt(); n]).unwrap();
        assert!((trace_moment(&m, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_moment(&m, 0).is_err());
    }

    #[test]
    fn auto_and_dense_agree_under_band_masks() {
        let n = 20;
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        for (pattern, mask) in [
            (LinkPattern::ReverseCirculant, MaskSpec::band_i(0.25)),
            (LinkPattern::ReverseCirculant, MaskSpec::band_ii(0.2)),
            (LinkPattern::SymmetricCirculant, MaskSpec::band_i(0.3)),
        ] {
            let spec = MatrixSpec::new(pattern, n).with_mask(mask);
            let len = crate::patterns::input_length(pattern, n).unwrap();
            let fast = spectrum(&spec, &x[..len], Solver::Auto).unwrap();
            let dense = spectrum(&spec, &x[..len], Solver::Dense).unwrap();
            for (a, b) in fast.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-10, "{pattern}: {a} vs {b}");
            }
        }
    }
}
