//! Running means with standard errors, and the z-score used by comparisons.

use serde::{Deserialize, Serialize};

/// A mean and its standard error `sd / √count`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub count: u64,
}

impl MeanSe {
    pub fn exact(value: f64) -> Self {
        MeanSe {
            mean: value,
            se: 0.0,
            count: 0,
        }
    }

    pub fn accumulator() -> Welford {
        Welford::default()
    }

    /// Sum of independent estimates; errors add in quadrature.
    pub fn sum<I: IntoIterator<Item = MeanSe>>(items: I) -> MeanSe {
        let mut mean = 0.0;
        let mut var = 0.0;
        let mut count = 0;
        for it in items {
            mean += it.mean;
            var += it.se * it.se;
            count += it.count;
        }
        MeanSe {
            mean,
            se: var.sqrt(),
            count,
        }
    }

    pub fn scaled(self, c: f64) -> MeanSe {
        MeanSe {
            mean: c * self.mean,
            se: c.abs() * self.se,
            count: self.count,
        }
    }
}

/// Welford's online mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Sample standard deviation (`n - 1` denominator); zero below two samples.
    pub fn sd(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0).sqrt()
        }
    }

    pub fn finish(&self) -> MeanSe {
        MeanSe {
            mean: self.mean,
            se: if self.n == 0 {
                0.0
            } else {
                self.sd() / (self.n as f64).sqrt()
            },
            count: self.n,
        }
    }
}

/// Relative rounding floor on the combined error. Quantities that are
/// deterministic in exact arithmetic (`m_2` with ±1 entries, say) otherwise
/// come out with a standard error of a few ulps and a meaningless z.
const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// `(a - b) / √(se_a² + se_b²)`, with the error floored at rounding level.
/// Two exact values give 0 on agreement and ±∞ otherwise.
pub fn z_score(a: MeanSe, b: MeanSe) -> f64 {
    let scale = a.mean.abs().max(b.mean.abs());
    let se = a.se.hypot(b.se);
    let se = if se > 0.0 {
        se.max(ROUNDING_FLOOR * scale)
    } else {
        se
    };
    let d = a.mean - b.mean;
    if se > 0.0 {
        d / se
    } else if d == 0.0 {
        0.0
    } else {
        d.signum() * f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, -2.0, 7.5, 3.25, 0.0];
        let mut w = MeanSe::accumulator();
        xs.iter().for_each(|&x| w.push(x));
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        let est = w.finish();
        assert!((est.mean - mean).abs() < 1e-14);
        assert!((est.se - (var / 6.0).sqrt()).abs() < 1e-14);

        let mut a = MeanSe::accumulator();
        let mut b = MeanSe::accumulator();
        xs[..2].iter().for_each(|&x| a.push(x));
        xs[2..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.finish().se - est.se).abs() < 1e-14);
    }

    #[test]
    fn z_scores() {
        let a = MeanSe {
            mean: 1.0,
            se: 0.3,
            count: 10,
        };
        let b = MeanSe {
            mean: 0.0,
            se: 0.4,
            count: 10,
        };
        assert!((z_score(a, b) - 2.0).abs() < 1e-12);
        assert_eq!(z_score(MeanSe::exact(2.0), MeanSe::exact(2.0)), 0.0);
        let noisy = MeanSe {
            mean: 1.0 - 3e-16,
            se: 1e-16,
            count: 30,
        };
        assert!(z_score(noisy, MeanSe::exact(1.0)).abs() < 0.1);
        assert!(z_score(MeanSe::exact(2.0), MeanSe::exact(1.0)).is_infinite());
    }
}
