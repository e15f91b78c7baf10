//! Closed-form spectra of the two circulant patterns through one FFT.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::patterns::{input_length, LinkPattern, Mask, MatrixSpec};

fn dft(x: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// Eigenvalues of the reverse circulant matrix with first row `x`, ascending.
///
/// The spectrum is `Σx`, `Σ(-1)^j x_j` when `n` is even, and `±|x̂_k|` for
/// `1 ≤ k ≤ ⌈n/2⌉ - 1`.
pub fn rc_eigenvalues_fast(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let f = dft(x);
    let mut out = Vec::with_capacity(n);
    out.push(f[0].re);
    if n % 2 == 0 {
        out.push(f[n / 2].re);
    }
    for fk in f.iter().take(n.div_ceil(2)).skip(1) {
        let r = fk.norm();
        out.push(r);
        out.push(-r);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenvalues of the `n × n` symmetric circulant matrix with inputs
/// `x_0..x_{⌊n/2⌋}`, ascending: the real DFT of its first row.
pub fn sc_eigenvalues_fast(x: &[f64], n: usize) -> Result<Vec<f64>> {
    if x.len() != n / 2 + 1 {
        return Err(Error::Argument(format!(
            "symmetric circulant of size {n} needs {} inputs, got {}",
            n / 2 + 1,
            x.len()
        )));
    }
    let row: Vec<f64> = (0..n).map(|j| x[j.min(n - j)]).collect();
    let mut out: Vec<f64> = dft(&row).into_iter().map(|c| c.re).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Whether masking keeps the matrix inside its circulant family.
pub fn fast_path_available(pattern: LinkPattern, mask: &Mask) -> bool {
    match pattern {
        LinkPattern::ReverseCirculant => !mask.is_positional(),
        LinkPattern::SymmetricCirculant => matches!(mask, Mask::None | Mask::BandI { .. }),
        _ => false,
    }
}

/// Inputs with the index mask applied (entries whose link index is dropped
/// are zeroed). Positional masks are left alone.
pub fn masked_inputs(spec: &MatrixSpec, inputs: &[f64]) -> Result<Vec<f64>> {
    let mask = spec.validate()?;
    let len = input_length(spec.pattern, spec.n)?;
    if inputs.len() != len {
        return Err(Error::Argument(format!(
            "expected {len} inputs, got {}",
            inputs.len()
        )));
    }
    let offset = spec.pattern.input_offset();
    Ok(inputs
        .iter()
        .enumerate()
        .map(|(p, &v)| {
            if mask.keeps_index(spec.pattern, spec.n, p + offset) {
                v
            } else {
                0.0
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::MatrixSpec;
    use crate::rng::{stream, stream_id, Domain};
    use crate::spectra::{build_matrix, eigenvalues_sym, DEFAULT_TOL};
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn two_by_two_and_zero() {
        let ev = rc_eigenvalues_fast(&[0.5, 2.0]);
        assert!((ev[0] - -1.5).abs() < 1e-15 && (ev[1] - 2.5).abs() < 1e-15);
        assert!(rc_eigenvalues_fast(&[0.0; 9]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fast_paths_match_dense_solver() {
        for n in [16usize, 64, 128, 7, 33] {
            for rep in 0..10 {
                let mut r = stream(5, stream_id(Domain::Test, n as u64, rep));
                let x: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
                let spec = MatrixSpec::new(LinkPattern::ReverseCirculant, n);
                let m = build_matrix(&spec, &x).unwrap();
                let dense = eigenvalues_sym(&m, DEFAULT_TOL).unwrap();
                let fast = rc_eigenvalues_fast(&x);
                let norm = m.frobenius_sq().sqrt();
                for (a, b) in dense.iter().zip(&fast) {
                    assert!((a - b).abs() <= 1e-10 * norm, "rc n={n}");
                }

                let xs = &x[..n / 2 + 1];
                let spec = MatrixSpec::new(LinkPattern::SymmetricCirculant, n);
                let m = build_matrix(&spec, xs).unwrap();
                let dense = eigenvalues_sym(&m, DEFAULT_TOL).unwrap();
                let fast = sc_eigenvalues_fast(xs, n).unwrap();
                let norm = m.frobenius_sq().sqrt();
                for (a, b) in dense.iter().zip(&fast) {
                    assert!((a - b).abs() <= 1e-10 * norm, "sc n={n}");
                }
            }
        }
    }

    #[test]
    fn rc_spectrum_is_symmetric_apart_from_special_values() {
        let x = [1.0, -0.5, 2.0, 0.25, 0.0, 3.0];
        let ev = rc_eigenvalues_fast(&x);
        let mut rest: Vec<f64> = ev
            .iter()
            .copied()
            .filter(|&v| {
                (v - 5.75).abs() > 1e-12 && (v - (1.0 + 0.5 + 2.0 - 0.25 + 0.0 - 3.0)).abs() > 1e-12
            })
            .collect();
        rest.sort_by(f64::total_cmp);
        let k = rest.len();
        for i in 0..k {
            assert!((rest[i] + rest[k - 1 - i]).abs() < 1e-12);
        }
    }
}
