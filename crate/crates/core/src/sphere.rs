//! Points of ℂⁿ, the unit sphere `S`, and reproducible uniform sampling from `σ`.
//!
//! # Sample streams
//!
//! A [`SphereSampler`] stream is a pure function of `(seed, dimension, draw index)`.
//! Draw index `i` belongs to chunk `i / CHUNK_LEN`; chunk `k` is generated by a
//! ChaCha8 generator keyed with `seed` and `dimension` (little-endian, in key bytes
//! 0..8 and 8..16) and positioned on stream `k`. Draws inside a chunk are
//! sequential, so a worker can reproduce any chunk independently and parallel
//! estimators reduce chunk results in ascending chunk order.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

/// Draws per independently seeded chunk of a sample stream.
pub const CHUNK_LEN: u64 = 4096;

const UNIT_TOL: f64 = 1e-12;
const RENORMALIZE_TOL: f64 = 1e-8;

pub(crate) type Coords = SmallVec<[Complex64; 4]>;

/// A point of ℂⁿ with finite coordinates.
#[derive(Clone, PartialEq)]
pub struct CPoint {
    coords: Coords,
}

impl CPoint {
    pub fn new(coords: impl IntoIterator<Item = Complex64>) -> Result<Self> {
        let coords: Coords = coords.into_iter().collect();
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(bad) = coords.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Range(bad.to_string()));
        }
        Ok(CPoint { coords })
    }

    pub fn origin(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        CPoint { coords: SmallVec::from_elem(Complex64::new(0.0, 0.0), n) }
    }

    /// Builds a point from real coordinate pairs `(re, im)`.
    pub fn from_parts(parts: &[(f64, f64)]) -> Result<Self> {
        CPoint::new(parts.iter().map(|&(re, im)| Complex64::new(re, im)))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn scale(&self, r: f64) -> CPoint {
        CPoint { coords: self.coords.iter().map(|z| z * r).collect() }
    }

    /// `|z_k|²` for each coordinate.
    pub fn abs_sq(&self) -> SmallVec<[f64; 4]> {
        self.coords.iter().map(|z| z.norm_sqr()).collect()
    }
}

impl fmt::Debug for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}

impl fmt::Display for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct ReIm {
    re: f64,
    im: f64,
}

impl Serialize for CPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coords.iter().map(|z| ReIm { re: z.re, im: z.im }))
    }
}

impl<'de> Deserialize<'de> for CPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<ReIm>::deserialize(deserializer)?;
        CPoint::new(parts.into_iter().map(|p| Complex64::new(p.re, p.im))).map_err(serde::de::Error::custom)
    }
}

/// A point of the unit sphere `S`.
#[derive(Clone, PartialEq)]
pub struct SpherePoint(CPoint);

impl SpherePoint {
    /// Accepts points within `1e-12` of unit norm as-is and renormalizes points
    /// within `1e-8`; anything further off is rejected.
    pub fn new(point: CPoint) -> Result<Self> {
        let r = point.norm();
        let gap = (r - 1.0).abs();
        if gap <= UNIT_TOL {
            Ok(SpherePoint(point))
        } else if gap <= RENORMALIZE_TOL {
            Ok(SpherePoint(point.scale(1.0 / r)))
        } else {
            Err(Error::OffSphere(r))
        }
    }

    pub fn point(&self) -> &CPoint {
        &self.0
    }

    pub fn coords(&self) -> &[Complex64] {
        self.0.coords()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// The interior point `rζ`.
    pub fn scaled(&self, r: f64) -> CPoint {
        self.0.scale(r)
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// `⟨z, w⟩ = Σ z_k w̄_k`.
pub fn herm_inner(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    Error::check_dim(z.dim(), w.dim())?;
    Ok(inner_unchecked(z.coords(), w.coords()))
}

pub(crate) fn inner_unchecked(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(z: &CPoint) -> f64 {
    z.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `ζ^α ζ̄^β`.
pub fn monomial_eval(zeta: &SpherePoint, alpha: &MultiIndex, beta: &MultiIndex) -> Result<Complex64> {
    Error::check_dim(zeta.dim(), alpha.dim())?;
    Error::check_dim(zeta.dim(), beta.dim())?;
    Ok(monomial_unchecked(zeta.coords(), alpha, beta))
}

pub(crate) fn monomial_unchecked(z: &[Complex64], alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for ((zk, &a), &b) in z.iter().zip(alpha.components()).zip(beta.components()) {
        if a > 0 {
            acc *= zk.powu(a);
        }
        if b > 0 {
            acc *= zk.conj().powu(b);
        }
    }
    acc
}

fn chunk_rng(seed: u64, dim: usize, chunk: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(dim as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(chunk);
    rng
}

/// Deterministic stream of `σ`-uniform points on `S ⊂ ℂⁿ`.
///
/// Each draw normalizes a vector of `2n` independent standard Gaussians.
#[derive(Clone)]
pub struct SphereSampler {
    dim: usize,
    seed: u64,
    counter: u64,
    rng: Option<ChaCha8Rng>,
}

impl SphereSampler {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(SphereSampler { dim, seed, counter: 0, rng: None })
    }

    /// A sampler positioned at draw `index` of the `(seed, dim)` stream.
    pub fn at(dim: usize, seed: u64, index: u64) -> Result<Self> {
        let mut s = SphereSampler::new(dim, seed)?;
        let chunk_start = index - index % CHUNK_LEN;
        s.counter = chunk_start;
        for _ in chunk_start..index {
            s.sample();
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index of the next draw.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn sample(&mut self) -> SpherePoint {
        if self.counter.is_multiple_of(CHUNK_LEN) || self.rng.is_none() {
            self.rng = Some(chunk_rng(self.seed, self.dim, self.counter / CHUNK_LEN));
        }
        let rng = self.rng.as_mut().expect("rng initialised above");
        let coords = loop {
            let v: Coords = (0..self.dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(re, im)
                })
                .collect();
            let r2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            // a zero vector has probability zero but is redrawn from the same chunk
            if r2 > 0.0 && r2.is_finite() {
                let inv = 1.0 / r2.sqrt();
                break v.into_iter().map(|z| z * inv).collect();
            }
        };
        self.counter += 1;
        SpherePoint(CPoint { coords })
    }

    /// Skips `count` draws.
    pub fn advance(&mut self, count: u64) {
        let target = self.counter + count;
        *self = SphereSampler::at(self.dim, self.seed, target).expect("dimension already validated");
    }

    /// Splits draws `[start, start + count)` at chunk boundaries.
    pub(crate) fn chunk_ranges(start: u64, count: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let end = start + count;
        let mut pos = start;
        while pos < end {
            let next = ((pos / CHUNK_LEN) + 1) * CHUNK_LEN;
            let stop = next.min(end);
            out.push((pos, stop - pos));
            pos = stop;
        }
        out
    }

    /// Draws the next `count` points, chunk-parallel, identical to calling
    /// [`sample`](Self::sample) `count` times.
    pub fn draw_many(&mut self, count: u64) -> Vec<SpherePoint> {
        use rayon::prelude::*;
        let (dim, seed) = (self.dim, self.seed);
        let points = Self::chunk_ranges(self.counter, count)
            .into_par_iter()
            .map(|(start, len)| {
                let mut s = SphereSampler::at(dim, seed, start).expect("dimension already validated");
                (0..len).map(|_| s.sample()).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        self.advance(count);
        points
    }
}

impl fmt::Debug for SphereSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereSampler")
            .field("dim", &self.dim)
            .field("seed", &self.seed)
            .field("counter", &self.counter)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(parts: &[(f64, f64)]) -> CPoint {
        CPoint::from_parts(parts).unwrap()
    }

    fn mi(c: &[u32]) -> MultiIndex {
        MultiIndex::new(c.iter().copied()).unwrap()
    }

    #[test]
    fn inner_product_and_norm() {
        let e1 = pt(&[(1.0, 0.0), (0.0, 0.0)]);
        let e2 = pt(&[(0.0, 0.0), (1.0, 0.0)]);
        let half = pt(&[(0.5, 0.0), (0.0, 0.0)]);
        assert_eq!(herm_inner(&e1, &e1).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(herm_inner(&e1, &e2).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(herm_inner(&half, &half).unwrap(), Complex64::new(0.25, 0.0));
        assert!(herm_inner(&e1, &pt(&[(1.0, 0.0)])).is_err());

        assert_eq!(e1.norm(), 1.0);
        assert_eq!(CPoint::origin(2).norm(), 0.0);
        assert!((pt(&[(0.0, 0.6), (0.8, 0.0)]).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_point_tolerances() {
        assert!(SpherePoint::new(pt(&[(1.0, 0.0), (0.0, 0.0)])).is_ok());
        let nearly = SpherePoint::new(pt(&[(1.0 + 1e-9, 0.0), (0.0, 0.0)])).unwrap();
        assert!((nearly.point().norm() - 1.0).abs() <= 1e-15);
        assert!(matches!(SpherePoint::new(pt(&[(0.5, 0.0)])), Err(Error::OffSphere(_))));
        assert!(CPoint::from_parts(&[(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn monomials() {
        let e1 = SpherePoint::new(pt(&[(1.0, 0.0), (0.0, 0.0)])).unwrap();
        let e2 = SpherePoint::new(pt(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert_eq!(monomial_eval(&e1, &mi(&[2, 0]), &mi(&[0, 0])).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(monomial_eval(&e2, &mi(&[1, 0]), &mi(&[0, 0])).unwrap(), Complex64::new(0.0, 0.0));
        assert!(monomial_eval(&e1, &mi(&[1]), &mi(&[0, 0])).is_err());

        let mut s = SphereSampler::new(2, 3).unwrap();
        for _ in 0..200 {
            let z = s.sample();
            let v = monomial_eval(&z, &mi(&[2, 1]), &mi(&[2, 1])).unwrap();
            assert!(v.im.abs() < 1e-15 && (0.0..=1.0).contains(&v.re));
            let w = monomial_eval(&z, &mi(&[3, 0]), &mi(&[0, 2])).unwrap();
            assert!(w.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn samples_are_unit_and_reproducible() {
        let mut a = SphereSampler::new(3, 42).unwrap();
        let mut b = SphereSampler::new(3, 42).unwrap();
        let mut c = SphereSampler::new(3, 43).unwrap();
        let mut differs = false;
        for _ in 0..(2 * CHUNK_LEN + 17) {
            let (x, y, w) = (a.sample(), b.sample(), c.sample());
            assert!((x.point().norm() - 1.0).abs() <= 1e-12);
            assert_eq!(x, y);
            differs |= x != w;
        }
        assert!(differs);
        // same seed, different dimension gives a different stream
        let p2 = SphereSampler::new(2, 42).unwrap().sample();
        let p2b = SphereSampler::new(2, 42).unwrap().sample();
        assert_eq!(p2, p2b);
    }

    #[test]
    fn random_access_matches_sequential() {
        let mut seq = SphereSampler::new(2, 9).unwrap();
        let all: Vec<_> = (0..CHUNK_LEN + 300).map(|_| seq.sample()).collect();
        for idx in [0, 1, 77, CHUNK_LEN - 1, CHUNK_LEN, CHUNK_LEN + 299] {
            let mut s = SphereSampler::at(2, 9, idx).unwrap();
            assert_eq!(s.sample(), all[idx as usize], "index {idx}");
        }
        let mut bulk = SphereSampler::new(2, 9).unwrap();
        bulk.advance(5);
        let many = bulk.draw_many(CHUNK_LEN + 100);
        assert_eq!(&many[..], &all[5..(CHUNK_LEN + 105) as usize]);
        assert_eq!(bulk.counter(), CHUNK_LEN + 105);
        assert_eq!(bulk.sample(), all[(CHUNK_LEN + 105) as usize]);
    }

    #[test]
    fn chunk_ranges_cover_exactly() {
        let r = SphereSampler::chunk_ranges(4000, 10_000);
        assert_eq!(r.first(), Some(&(4000, 96)));
        assert_eq!(r.iter().map(|x| x.1).sum::<u64>(), 10_000);
        assert!(r.windows(2).all(|w| w[0].0 + w[0].1 == w[1].0));
        assert!(SphereSampler::chunk_ranges(7, 0).is_empty());
    }
}
