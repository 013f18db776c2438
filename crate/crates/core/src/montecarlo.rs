//! Chunk-parallel Monte-Carlo means over `σ` with standard errors.
//!
//! Every estimator walks the draws of a [`SphereSampler`] stream in chunks of
//! [`CHUNK_LEN`](crate::sphere::CHUNK_LEN), accumulates Welford statistics per chunk
//! and merges the chunks in ascending order, so results are bit-identical
//! regardless of how rayon schedules the work.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::{SpherePoint, SphereSampler, CHUNK_LEN};

/// A Monte-Carlo mean with its standard error.
///
/// For complex integrands `stderr² = (Var Re + Var Im) / samples`, so
/// `E|value − truth|² ≈ stderr²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub value: Complex64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// `|value − truth| ≤ k · stderr`.
    pub fn within(&self, truth: Complex64, k: f64) -> bool {
        (self.value - truth).norm() <= k * self.stderr
    }

    /// `|value − truth| / stderr`; infinite when the estimate is exact but wrong.
    pub fn z_score(&self, truth: Complex64) -> f64 {
        let diff = (self.value - truth).norm();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    count: u64,
    mean: Complex64,
    m2: f64,
}

impl Moments {
    pub(crate) fn push(&mut self, x: Complex64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        let after = x - self.mean;
        self.m2 += delta.re * after.re + delta.im * after.im;
    }

    pub(crate) fn push_real(&mut self, x: f64) {
        self.push(Complex64::new(x, 0.0));
    }

    pub(crate) fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / total as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta.norm_sqr() * self.count as f64 * w;
        self.count = total;
    }

    pub(crate) fn mean(&self) -> Complex64 {
        self.mean
    }

    /// Standard error of the mean.
    pub(crate) fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let n = self.count as f64;
        (self.m2.max(0.0) / (n - 1.0) / n).sqrt()
    }

    pub(crate) fn into_estimate(self, seed: u64) -> MCEstimate {
        MCEstimate { value: self.mean, stderr: self.stderr(), samples: self.count, seed }
    }
}

pub(crate) fn require_samples(samples: u64) -> Result<()> {
    if samples < 2 {
        return Err(Error::Precondition(format!("need at least 2 samples, got {samples}")));
    }
    Ok(())
}

pub(crate) fn check_value(point: &SpherePoint, v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { point: point.to_string() })
    }
}

/// Mean of `integrand` over the next `samples` draws of `sampler`; the sampler is
/// advanced past them.
pub fn estimate<F>(sampler: &mut SphereSampler, samples: u64, integrand: F) -> Result<MCEstimate>
where
    F: Fn(&SpherePoint) -> Result<Complex64> + Sync,
{
    require_samples(samples)?;
    let (dim, seed) = (sampler.dim(), sampler.seed());
    let chunks = SphereSampler::chunk_ranges(sampler.counter(), samples)
        .into_par_iter()
        .map(|(start, len)| {
            let mut s = SphereSampler::at(dim, seed, start)?;
            let mut m = Moments::default();
            for _ in 0..len {
                let z = s.sample();
                let v = integrand(&z)?;
                m.push(check_value(&z, v)?);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Moments::default();
    for m in &chunks {
        total.merge(m);
    }
    sampler.advance(samples);
    Ok(total.into_estimate(seed))
}

/// Mean of `integrand` over a fixed sample set (common random numbers).
pub fn estimate_over<F>(points: &[SpherePoint], seed: u64, integrand: F) -> Result<MCEstimate>
where
    F: Fn(&SpherePoint) -> Result<Complex64> + Sync,
{
    require_samples(points.len() as u64)?;
    let chunks = points
        .par_chunks(CHUNK_LEN as usize)
        .map(|chunk| {
            let mut m = Moments::default();
            for z in chunk {
                m.push(check_value(z, integrand(z)?)?);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Moments::default();
    for m in &chunks {
        total.merge(m);
    }
    Ok(total.into_estimate(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn welford_merge_matches_direct() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push_real(x));
        let mut left = Moments::default();
        let mut right = Moments::default();
        xs[..313].iter().for_each(|&x| left.push_real(x));
        xs[313..].iter().for_each(|&x| right.push_real(x));
        left.merge(&right);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((whole.mean().re - mean).abs() < 1e-12);
        assert!((left.mean().re - mean).abs() < 1e-12);
        let se = (var / xs.len() as f64).sqrt();
        assert!((whole.stderr() - se).abs() < 1e-12);
        assert!((left.stderr() - se).abs() < 1e-12);
    }

    #[test]
    fn constant_integrand_is_exact() {
        let mut s = SphereSampler::new(2, 1).unwrap();
        let est = estimate(&mut s, 20_000, |_| Ok(c(1.0))).unwrap();
        assert_eq!(est.value, c(1.0));
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.samples, 20_000);
        assert_eq!(s.counter(), 20_000);
    }

    #[test]
    fn errors_are_reported() {
        let mut s = SphereSampler::new(2, 1).unwrap();
        assert!(matches!(estimate(&mut s, 1, |_| Ok(c(1.0))), Err(Error::Precondition(_))));
        let r = estimate(&mut s, 100, |_| Ok(c(f64::NAN)));
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn estimate_is_deterministic_and_matches_fixed_set() {
        let f = |z: &SpherePoint| Ok(z.coords()[0] * z.coords()[1].conj());
        let a = estimate(&mut SphereSampler::new(2, 5).unwrap(), 10_000, f).unwrap();
        let b = estimate(&mut SphereSampler::new(2, 5).unwrap(), 10_000, f).unwrap();
        assert_eq!(a, b);
        let pts = SphereSampler::new(2, 5).unwrap().draw_many(10_000);
        let c = estimate_over(&pts, 5, f).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn symmetric_moments_of_samples() {
        // ∫|ζ₁|² dσ = 1/n and ∫ζ₁ dσ = 0 by symmetry
        let mut s = SphereSampler::new(2, 2024).unwrap();
        let sq = estimate(&mut s, 1_000_000, |z| Ok(c(z.coords()[0].norm_sqr()))).unwrap();
        assert!(sq.within(c(0.5), 4.0), "{sq:?}");
        let lin = estimate(&mut s, 1_000_000, |z| Ok(z.coords()[0])).unwrap();
        assert!(lin.within(c(0.0), 4.0), "{lin:?}");
    }
}
