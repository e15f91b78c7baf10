use crate::error::{Error, Result};
use crate::patterns::{input_length, MatrixSpec};

/// Largest dimension accepted by [`build_matrix`].
pub const MAX_DIMENSION: usize = 4096;

/// Dense symmetric matrix stored as its packed lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    lower: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            lower: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from a full row-major matrix, reading only the lower triangle.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Argument("matrix rows must all have length n".into()));
        }
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for j in 0..=i {
                m.set(i, j, row[j]);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based element access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[packed(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.lower[packed(i, j)] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `Σ_{ij} a_{ij}²`
    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                s += 2.0 * self.get(i, j).powi(2);
            }
            s += self.get(i, i).powi(2);
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.lower.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn add_diagonal(&mut self, c: f64) {
        for i in 0..self.n {
            let v = self.get(i, i);
            self.set(i, i, v + c);
        }
    }
}

/// `a_{ij} = inputs[L(i,j) - offset]` where the mask keeps `(i, j)`, else 0.
pub fn build_matrix(spec: &MatrixSpec, inputs: &[f64]) -> Result<SymmetricMatrix> {
    let mask = spec.validate()?;
    let n = spec.n;
    if n > MAX_DIMENSION {
        return Err(Error::capacity(
            "dense matrix dimension",
            n as u128,
            MAX_DIMENSION as u128,
        ));
    }
    let pattern = spec.pattern;
    let len = input_length(pattern, n)?;
    if inputs.len() != len {
        return Err(Error::Argument(format!(
            "{pattern} of size {n} needs {len} inputs, got {}",
            inputs.len()
        )));
    }
    let offset = pattern.input_offset();
    let mut m = SymmetricMatrix::zeros(n);
    for i in 1..=n {
        for j in 1..=i {
            if mask.keeps(pattern, n, i, j) {
                m.set(i - 1, j - 1, inputs[pattern.link(n, i, j) - offset]);
            }
        }
    }
    Ok(m)
}

/// `(1/n) Tr((A - B)²)` for one realization.
pub fn d2_bound(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::Argument(format!(
            "dimension mismatch: {} vs {}",
            a.n, b.n
        )));
    }
    let mut s = 0.0;
    for i in 0..a.n {
        for j in 0..=i {
            let d = (a.get(i, j) - b.get(i, j)).powi(2);
            s += if i == j { d } else { 2.0 * d };
        }
    }
    Ok(s / a.n as f64)
}
