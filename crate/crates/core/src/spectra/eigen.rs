//! Householder tridiagonalization followed by implicit QL with Wilkinson-type
//! shifts. Eigenvalues only.

use super::matrix::SymmetricMatrix;
use crate::error::{Error, Result};

/// Relative deflation threshold used by default.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Reduces the full symmetric matrix `a` (row-major, n × n) to tridiagonal
/// form. Returns the diagonal and the subdiagonal (`e[i] = T[i+1][i]`,
/// `e[n-1] = 0`).
fn tridiagonalize(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let scale: f64 = (lo..n).map(|i| a[i * n + k].abs()).sum();
        if scale == 0.0 {
            d[k] = a[k * n + k];
            e[k] = 0.0;
            continue;
        }
        let mut sigma = 0.0;
        for i in lo..n {
            u[i] = a[i * n + k] / scale;
            sigma += u[i] * u[i];
        }
        let norm = sigma.sqrt();
        let alpha = if u[lo] > 0.0 { -norm } else { norm };
        // H = I - u uᵀ / h with u = x - alpha e_1 and h = uᵀu / 2.
        let h = sigma - u[lo] * alpha;
        u[lo] -= alpha;
        // p = A u / h, restricted to the trailing block.
        let mut up = 0.0;
        for i in lo..n {
            let row = &a[i * n..i * n + n];
            let s: f64 = (lo..n).map(|j| row[j] * u[j]).sum();
            p[i] = s / h;
            up += u[i] * p[i];
        }
        let kk = up / (2.0 * h);
        for i in lo..n {
            p[i] -= kk * u[i];
        }
        // A ← A - u qᵀ - q uᵀ with q = p.
        for i in lo..n {
            let (ui, qi) = (u[i], p[i]);
            let row = &mut a[i * n..i * n + n];
            for j in lo..n {
                row[j] -= ui * p[j] + qi * u[j];
            }
        }
        d[k] = a[k * n + k];
        e[k] = scale * alpha;
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + n - 2];
        e[n - 2] = a[(n - 1) * n + n - 2];
    }
    if n >= 1 {
        d[n - 1] = a[(n - 1) * n + n - 1];
    }
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix; `d` is overwritten with
/// the eigenvalues (unsorted).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], tol: f64) -> Result<()> {
    let n = d.len();
    let cap = 30 * n.max(1);
    let mut total = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= tol * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > cap {
                return Err(Error::Numeric(format!(
                    "QL iteration did not converge after {cap} sweeps (n = {n}, \
                     block starting at {l}, residual off-diagonal {:e})",
                    e[l].abs()
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of `m`, ascending. `tol` is the relative deflation
/// threshold (clamped below at machine epsilon).
pub fn eigenvalues_sym(m: &SymmetricMatrix, tol: f64) -> Result<Vec<f64>> {
    let n = m.n();
    if n == 0 {
        return Err(Error::Argument("empty matrix".into()));
    }
    let mut full = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            full[i * n + j] = m.get(i, j);
        }
    }
    let (mut d, mut e) = tridiagonalize(full, n);
    tridiagonal_ql(&mut d, &mut e, tol.max(f64::EPSILON))?;
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite eigenvalue".into()));
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}
