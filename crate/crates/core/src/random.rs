//! Seeded random polynomials for property tests and the `verify` harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{ComplexRational, Rational};
use crate::multiindex::MultiIndex;
use crate::sphere_poly::{HolomorphicPolynomial, SpherePolynomial};
use crate::tracetest::szego_residual;

/// Draws small random polynomials with exact coefficients `p/q`, `|p| ≤ 9`, `1 ≤ q ≤ 6`.
#[derive(Debug, Clone)]
pub struct PolyGenerator {
    rng: ChaCha8Rng,
}

impl PolyGenerator {
    pub fn new(seed: u64) -> Self {
        PolyGenerator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn small_rational(&mut self) -> Rational {
        let p: i64 = self.rng.random_range(-9..=9);
        let q: i64 = self.rng.random_range(1..=6);
        Rational::new(p, q).expect("q ≥ 1")
    }

    /// A nonzero coefficient; purely real half the time.
    pub fn coefficient(&mut self) -> ComplexRational {
        loop {
            let re = self.small_rational();
            let im = if self.rng.random_bool(0.5) { self.small_rational() } else { Rational::zero() };
            let c = ComplexRational::new(re, im);
            if !c.is_zero() {
                return c;
            }
        }
    }

    /// A uniformly random total degree `≤ max_degree`, split at random among `n` slots.
    pub fn multi_index(&mut self, n: usize, max_degree: u32) -> MultiIndex {
        let d = self.rng.random_range(0..=max_degree);
        let mut comps = vec![0u32; n];
        for _ in 0..d {
            comps[self.rng.random_range(0..n)] += 1;
        }
        MultiIndex::new(comps).expect("n ≥ 1")
    }

    /// Up to `max_terms` terms `b_μ z^μ` with `|μ| ≤ max_degree`.
    pub fn holomorphic(&mut self, n: usize, max_degree: u32, max_terms: usize) -> HolomorphicPolynomial {
        let count = self.rng.random_range(1..=max_terms);
        let mut g = HolomorphicPolynomial::zero(n).expect("n ≥ 1");
        for _ in 0..count {
            let mu = self.multi_index(n, max_degree);
            let c = self.coefficient();
            g.add_term(mu, &c).expect("same dimension");
        }
        g
    }

    /// Up to `max_terms` terms `a ζ^μ ζ̄^ν` with `|μ| + |ν| ≤ max_degree`.
    pub fn sphere_poly(&mut self, n: usize, max_degree: u32, max_terms: usize) -> SpherePolynomial {
        let count = self.rng.random_range(1..=max_terms);
        let mut f = SpherePolynomial::zero(n).expect("n ≥ 1");
        for _ in 0..count {
            let mu = self.multi_index(n, max_degree);
            let nu = self.multi_index(n, max_degree - mu.degree());
            let c = self.coefficient();
            f.add_term(mu, nu, &c).expect("same dimension");
        }
        f
    }

    /// A holomorphic polynomial of degree `≤ max_degree`, disguised by adding a
    /// random multiple of `ζ₁ζ̄₁ + … + ζ_nζ̄_n − 1`, which vanishes on `S`.
    pub fn member(&mut self, n: usize, max_degree: u32) -> SpherePolynomial {
        let g = SpherePolynomial::from_holomorphic(&self.holomorphic(n, max_degree, 4));
        let mut zero_on_s = SpherePolynomial::sphere_relation(n).expect("n ≥ 1");
        zero_on_s.add_term(MultiIndex::zero(n), MultiIndex::zero(n), &-ComplexRational::one()).expect("same dimension");
        let disguise = self.sphere_poly(n, max_degree.saturating_sub(2), 2);
        g.checked_add(&zero_on_s.checked_mul(&disguise).expect("same dimension")).expect("same dimension")
    }

    /// A polynomial with `|μ| + |ν| ≤ max_degree` and positive Szegő residual.
    pub fn non_member(&mut self, n: usize, max_degree: u32) -> SpherePolynomial {
        loop {
            let f = self.sphere_poly(n, max_degree, 4);
            if szego_residual(&f).0.is_positive() {
                return f;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_within_bounds() {
        let mut a = PolyGenerator::new(3);
        let mut b = PolyGenerator::new(3);
        for _ in 0..50 {
            let f = a.sphere_poly(3, 4, 5);
            assert_eq!(f, b.sphere_poly(3, 4, 5));
            assert!(f.terms().all(|(mu, nu, _)| mu.degree() + nu.degree() <= 4));
            let g = a.holomorphic(2, 3, 3);
            assert_eq!(g, b.holomorphic(2, 3, 3));
            assert!(g.degree() <= 3);
        }
    }

    #[test]
    fn members_and_non_members() {
        let mut gen = PolyGenerator::new(9);
        for n in 1..4 {
            for _ in 0..10 {
                assert!(szego_residual(&gen.member(n, 3)).0.is_zero());
                assert!(szego_residual(&gen.non_member(n, 3)).0.is_positive());
            }
        }
    }
}
