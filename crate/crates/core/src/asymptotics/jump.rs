//! The random variable `Z = X·Y` whose even moments are `a_{2n} = C(2n, n)/2`.
//!
//! `X` has the arcsine law on `[-2, 2]`, sampled as `2 s sin(πU/2)` with a
//! random sign `s`, and `Y` is an independent Bernoulli(1/2).

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream, stream_id, Domain, Stream};
use crate::stats::MeanSe;

pub fn jump_distribution_sample(rng: &mut Stream) -> f64 {
    let u: f64 = rng.random();
    let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let y = if rng.random::<bool>() { 1.0 } else { 0.0 };
    2.0 * s * (FRAC_PI_2 * u).sin() * y
}

/// Monte Carlo estimate of `E[Z^power]`.
pub fn jump_moment_check(power: u32, samples: u64, seed: u64) -> Result<MeanSe> {
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let mut rng = stream(seed, stream_id(Domain::Jump, power as u64, 0));
    let mut acc = MeanSe::accumulator();
    for _ in 0..samples {
        acc.push(jump_distribution_sample(&mut rng).powi(power as i32));
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::a_coefficient;

    #[test]
    fn even_moments_are_a_coefficients() {
        for two_k in [2u32, 4, 6] {
            let est = jump_moment_check(two_k, 1_000_000, 1).unwrap();
            let a = a_coefficient(two_k as usize).unwrap();
            assert!((est.mean - a).abs() <= 3.0 * est.se, "{two_k}: {est:?}");
        }
    }

    #[test]
    fn odd_moments_vanish() {
        for k in [1u32, 3] {
            let est = jump_moment_check(k, 1_000_000, 2).unwrap();
            assert!(est.mean.abs() <= 3.0 * est.se, "{k}: {est:?}");
        }
    }

    #[test]
    fn support() {
        let mut rng = stream(0, 0);
        for _ in 0..10_000 {
            assert!(jump_distribution_sample(&mut rng).abs() <= 2.0);
        }
    }
}
