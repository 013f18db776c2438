//! Cauchy and invariant Poisson integrals of sphere data, and radial slices.
//!
//! For polynomial data the Cauchy transform is exact: integrating the kernel
//! series term by term gives `C[ζ^μ ζ̄^ν](z) = (c_μ / c_{μ−ν}) z^{μ−ν}` when
//! `μ ≥ ν` and `0` otherwise.
//!
//! The Poisson transform of a general monomial is not a polynomial. It is
//! evaluated from the truncated moment expansion
//!
//! ```text
//! P[f](z) ≈ (1 − |z|²)ⁿ Σ_{|υ|,|ω| ≤ N} c_ω⁻¹ c_υ⁻¹ z^ω z̄^υ ∫ ζ^υ ζ̄^ω f dσ.
//! ```
//!
//! For one term `a ζ^μ ζ̄^ν`, write `d⁺ = (μ−ν)₊`, `d⁻ = (ν−μ)₊`,
//! `g = min(μ,ν)`, `e = d⁺ + d⁻` and `y_k = |z_k|²`. The only surviving pairs
//! are `ω = d⁺ + t`, `υ = d⁻ + t`, and summing over `t` with `|t|` fixed
//! (multinomial theorem, `Σ y_k = |z|²`) collapses the double series to
//!
//! ```text
//! a (1 − ρ²)ⁿ z^{d⁺} z̄^{d⁻} Σ_{m ≤ g} B_m y^m Σ_{j=|m|}^{T} W(j) ρ^{2(j−|m|)} / (j−|m|)!
//! ```
//!
//! with `ρ = |z|`, `T = N − max(|d⁺|, |d⁻|)`,
//! `W(j) = (n−1+|d⁺|+j)! (n−1+|d⁻|+j)! / ((n−1)! (n−1+|g|+|e|+j)!)` and
//! `B_m = Π_k g_k! binom(e_k+g_k, g_k−m_k) / m_k!`. This is the same truncated
//! sum, rearranged; it costs `O(N)` per term instead of `O(N^{2n})`, which is
//! what makes radii close to 1 reachable.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::kernels::{cauchy_kernel, poisson_kernel, series_tail_bound};
use crate::montecarlo::{self, MCEstimate, Moments};
use crate::multiindex::{c_constant, MultiIndex};
use crate::report::fmt_f64;
use crate::sphere::{CPoint, SpherePoint, SphereSampler, CHUNK_LEN};
use crate::sphere_poly::{HolomorphicPolynomial, SpherePolynomial};

/// Series tail tolerance used by [`radial_scan`].
pub const SCAN_TOLERANCE: f64 = 1e-8;

/// Largest truncation order [`order_for_tolerance`] will consider.
pub const MAX_SERIES_ORDER: u32 = 1 << 22;

/// How far `|z|` may sit from the radius a [`PoissonExpansion`] was built for.
const RADIUS_TOL: f64 = 1e-9;

/// The exact Szegő projection of polynomial data.
pub fn cauchy_transform_poly(f: &SpherePolynomial) -> HolomorphicPolynomial {
    let mut g = HolomorphicPolynomial::zero(f.dim()).expect("polynomial dimension is positive");
    for (mu, nu, a) in f.terms() {
        let Ok(lambda) = mu.sub_checked(nu) else { continue };
        let ratio = c_constant(mu).checked_div(&c_constant(&lambda)).expect("c_λ is positive");
        g.add_term(lambda, &a.scale(&ratio)).expect("same dimension");
    }
    g
}

/// `g(z)` in floating point.
pub fn eval_holo(g: &HolomorphicPolynomial, z: &CPoint) -> Result<Complex64> {
    g.eval(z)
}

fn require_interior(z: &CPoint) -> Result<()> {
    let r = z.norm();
    if r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideBall(r))
    }
}

/// Monte-Carlo `C[g](z) = ∫ C(z,ζ) g(ζ) dσ(ζ)`.
pub fn cauchy_transform_mc<G>(g: G, z: &CPoint, sampler: &mut SphereSampler, samples: u64) -> Result<MCEstimate>
where
    G: Fn(&SpherePoint) -> Complex64 + Sync,
{
    Error::check_dim(sampler.dim(), z.dim())?;
    require_interior(z)?;
    montecarlo::estimate(sampler, samples, |zeta| {
        let gz = montecarlo::check_value(zeta, g(zeta))?;
        Ok(cauchy_kernel(z, zeta.point())? * gz)
    })
}

/// Monte-Carlo `P[g](z) = ∫ P(z,ζ) g(ζ) dσ(ζ)`.
pub fn poisson_transform_mc<G>(g: G, z: &CPoint, sampler: &mut SphereSampler, samples: u64) -> Result<MCEstimate>
where
    G: Fn(&SpherePoint) -> Complex64 + Sync,
{
    Error::check_dim(sampler.dim(), z.dim())?;
    require_interior(z)?;
    montecarlo::estimate(sampler, samples, |zeta| {
        let gz = montecarlo::check_value(zeta, g(zeta))?;
        Ok(poisson_kernel(z, zeta)? * gz)
    })
}

/// Bound on `|P[f](z) − truncated series|` for `|z| = ρ`.
///
/// The truncation replaces `C(z,ζ)C(ζ,z)` by the product of two kernel series
/// cut at degree `N`; that product is off by at most
/// `2 (1−ρ)^{−n} tail(ρ, N)`, and `(1−ρ²)ⁿ (1−ρ)^{−n} = (1+ρ)ⁿ`.
pub fn poisson_tail_bound(f: &SpherePolynomial, radius: f64, order: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&radius) {
        return Err(Error::OutsideBall(radius));
    }
    let l1 = f.coefficient_l1();
    if l1 == 0.0 || radius == 0.0 {
        return Ok(0.0);
    }
    let n = f.dim();
    Ok(2.0 * (1.0 + radius).powi(n as i32) * series_tail_bound(radius, order, n)? * l1)
}

/// Smallest order whose [`poisson_tail_bound`] is below `tol`.
pub fn order_for_tolerance(f: &SpherePolynomial, radius: f64, tol: f64) -> Result<u32> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let fits = |order: u32| poisson_tail_bound(f, radius, order).map(|b| b < tol);
    if fits(0)? {
        return Ok(0);
    }
    let mut hi = 1u32;
    while !fits(hi)? {
        if hi >= MAX_SERIES_ORDER {
            return Err(Error::Divergent(radius));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    // fits(lo) is false, fits(hi) is true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

type Exponents = SmallVec<[u32; 4]>;

#[derive(Debug, Clone)]
struct ExpandedTerm {
    /// `a (1 − ρ²)ⁿ`.
    coef: Complex64,
    dplus: MultiIndex,
    dminus: MultiIndex,
    /// `(m, B_m · S(|m|))` where `S(L)` is the inner radial sum.
    weights: Vec<(Exponents, f64)>,
}

/// The truncated Poisson series of `f`, prepared for every point of one sphere
/// `|z| = ρ`.
#[derive(Debug, Clone)]
pub struct PoissonExpansion {
    dim: usize,
    radius: f64,
    order: u32,
    tail_bound: f64,
    terms: Vec<ExpandedTerm>,
}

fn factorial_f64(k: u32) -> f64 {
    (2..=k).map(f64::from).product()
}

fn binom_f64(a: u32, b: u32) -> f64 {
    if b > a {
        return 0.0;
    }
    (0..b).fold(1.0, |acc, i| acc * f64::from(a - i) / f64::from(i + 1))
}

/// `S(L) = Σ_{j=L}^{T} W(j) ρ^{2(j−L)} / (j−L)!` for `L = 0..=max_l`.
fn radial_sums(n: u32, a: u32, b: u32, c: u32, rho2: f64, top: i64, max_l: u32) -> Vec<f64> {
    // W(0) = [(n−1+a)!/(n−1)!] / [(n−1+c)!/(n−1+b)!], with c ≥ b
    let up: f64 = (n..n + a).map(f64::from).product();
    let down: f64 = (n + b..n + c).map(f64::from).product();
    let ratio = |j: u32| {
        let j = f64::from(j);
        let n = f64::from(n);
        (n + f64::from(a) + j) * (n + f64::from(b) + j) / (n + f64::from(c) + j)
    };
    let mut w = up / down;
    let mut out = Vec::with_capacity(max_l as usize + 1);
    for l in 0..=max_l {
        if i64::from(l) > top {
            out.push(0.0);
        } else {
            let mut term = w;
            let mut sum = term;
            for j in l..top as u32 {
                term *= ratio(j) * rho2 / f64::from(j + 1 - l);
                sum += term;
                if term == 0.0 {
                    break;
                }
            }
            out.push(sum);
        }
        w *= ratio(l);
    }
    out
}

impl PoissonExpansion {
    pub fn new(f: &SpherePolynomial, radius: f64, order: u32) -> Result<Self> {
        let tail_bound = poisson_tail_bound(f, radius, order)?;
        let n = f.dim() as u32;
        let rho2 = radius * radius;
        let damp = (1.0 - rho2).powi(n as i32);
        let mut terms = Vec::with_capacity(f.len());
        for (mu, nu, a) in f.terms() {
            let (dplus, dminus) = mu.split_difference(nu)?;
            let g = mu.meet(nu)?;
            let (dp, dm) = (dplus.degree(), dminus.degree());
            let top = i64::from(order) - i64::from(dp.max(dm));
            if top < 0 {
                continue;
            }
            let per_coord: Vec<Vec<f64>> = g
                .components()
                .iter()
                .zip(dplus.components().iter().zip(dminus.components()))
                .map(|(&gk, (&p, &q))| {
                    let ek = p + q;
                    (0..=gk)
                        .map(|m| factorial_f64(gk) * binom_f64(ek + gk, gk - m) / factorial_f64(m))
                        .collect()
                })
                .collect();
            let sums = radial_sums(n, dp, dm, g.degree() + dp + dm, rho2, top, g.degree());
            let mut weights = Vec::new();
            let mut m: Exponents = SmallVec::from_elem(0, g.dim());
            loop {
                let level: u32 = m.iter().sum();
                let bm: f64 = m.iter().zip(&per_coord).map(|(&mk, b)| b[mk as usize]).product();
                let w = bm * sums[level as usize];
                if w != 0.0 {
                    weights.push((m.clone(), w));
                }
                // odometer over m ≤ g
                let mut k = 0;
                while k < m.len() && m[k] == g.components()[k] {
                    m[k] = 0;
                    k += 1;
                }
                if k == m.len() {
                    break;
                }
                m[k] += 1;
            }
            terms.push(ExpandedTerm { coef: a.to_complex64()? * damp, dplus, dminus, weights });
        }
        Ok(PoissonExpansion { dim: f.dim(), radius, order, tail_bound, terms })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Bound on the truncation error of [`eval`](Self::eval).
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// The truncated series at `z`, which must satisfy `|z| = radius`.
    pub fn eval(&self, z: &CPoint) -> Result<Complex64> {
        Error::check_dim(self.dim, z.dim())?;
        let r = z.norm();
        if (r - self.radius).abs() > RADIUS_TOL {
            return Err(Error::Precondition(format!(
                "expansion built for |z| = {}, got |z| = {r}",
                self.radius
            )));
        }
        Ok(self.eval_coords(z.coords()))
    }

    pub(crate) fn eval_coords(&self, z: &[Complex64]) -> Complex64 {
        let y: SmallVec<[f64; 4]> = z.iter().map(|c| c.norm_sqr()).collect();
        let zbar: SmallVec<[Complex64; 4]> = z.iter().map(|c| c.conj()).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let radial: f64 = t
                .weights
                .iter()
                .map(|(m, w)| w * y.iter().zip(m).map(|(yk, &mk)| yk.powi(mk as i32)).product::<f64>())
                .sum();
            acc += t.coef * t.dplus.pow(z) * t.dminus.pow(&zbar) * radial;
        }
        acc
    }
}

/// The truncated moment series for `P[f](z)` at order `N`, with its tail bound.
pub fn poisson_series_eval(f: &SpherePolynomial, z: &CPoint, order: u32) -> Result<(Complex64, f64)> {
    Error::check_dim(f.dim(), z.dim())?;
    let r = z.norm();
    if r >= 1.0 {
        return Err(Error::OutsideBall(r));
    }
    let exp = PoissonExpansion::new(f, r, order)?;
    Ok((exp.eval_coords(z.coords()), exp.tail_bound()))
}

/// One radius of a [`radial_scan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialScanRow {
    pub r: f64,
    pub p: f64,
    /// `‖P[f]_r − f‖_p`.
    pub lp_error: f64,
    pub lp_error_stderr: f64,
    /// `‖P[f]_r‖_p`.
    pub lp_norm_r: f64,
    pub lp_norm_r_stderr: f64,
    /// `‖f‖_p` on the same samples.
    pub f_norm: f64,
    pub f_norm_stderr: f64,
    /// Series order used for `P[f](rζ)`.
    pub order: u32,
    pub samples: u64,
    pub seed: u64,
}

/// `mean^{1/p}` with its delta-method standard error.
fn root_with_stderr(m: &Moments, p: f64) -> (f64, f64) {
    let mean = m.mean().re.max(0.0);
    if mean == 0.0 {
        return (0.0, 0.0);
    }
    let value = mean.powf(1.0 / p);
    (value, value / mean / p * m.stderr())
}

/// `L^p` distances between `f` and its radial slices `P[f]_r(ζ) = P[f](rζ)`,
/// estimated on one shared set of `samples` draws.
pub fn radial_scan(
    f: &SpherePolynomial,
    p: f64,
    radii: &[f64],
    sampler: &mut SphereSampler,
    samples: u64,
) -> Result<Vec<RadialScanRow>> {
    Error::check_dim(f.dim(), sampler.dim())?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("exponent must be in [1, ∞), got {p}")));
    }
    if let Some(&r) = radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(Error::OutsideBall(r));
    }
    montecarlo::require_samples(samples)?;
    let seed = sampler.seed();
    let points = sampler.draw_many(samples);
    let fterms = f.float_terms()?;
    radii
        .iter()
        .map(|&r| {
            let order = order_for_tolerance(f, r, SCAN_TOLERANCE)?;
            let exp = PoissonExpansion::new(f, r, order)?;
            let parts = points
                .par_chunks(CHUNK_LEN as usize)
                .map(|chunk| {
                    let (mut err, mut norm, mut fnorm) = (Moments::default(), Moments::default(), Moments::default());
                    for zeta in chunk {
                        let fz = crate::sphere_poly::eval_float_terms(&fterms, zeta.coords());
                        let u = exp.eval_coords(zeta.scaled(r).coords());
                        let u = montecarlo::check_value(zeta, u)?;
                        err.push_real((u - fz).norm().powf(p));
                        norm.push_real(u.norm().powf(p));
                        fnorm.push_real(fz.norm().powf(p));
                    }
                    Ok((err, norm, fnorm))
                })
                .collect::<Result<Vec<_>>>()?;
            let (mut err, mut norm, mut fnorm) = (Moments::default(), Moments::default(), Moments::default());
            for (e, nm, fm) in &parts {
                err.merge(e);
                norm.merge(nm);
                fnorm.merge(fm);
            }
            let (lp_error, lp_error_stderr) = root_with_stderr(&err, p);
            let (lp_norm_r, lp_norm_r_stderr) = root_with_stderr(&norm, p);
            let (f_norm, f_norm_stderr) = root_with_stderr(&fnorm, p);
            Ok(RadialScanRow {
                r,
                p,
                lp_error,
                lp_error_stderr,
                lp_norm_r,
                lp_norm_r_stderr,
                f_norm,
                f_norm_stderr,
                order,
                samples,
                seed,
            })
        })
        .collect()
}

pub const RADIAL_SCAN_HEADER: &str = "r,p,lp_error,lp_error_stderr,lp_norm_r,samples,seed";

/// CSV rendering with the fixed header and 17-digit floats.
pub fn radial_scan_csv(rows: &[RadialScanRow]) -> String {
    let mut out = String::from(RADIAL_SCAN_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(row.r),
            fmt_f64(row.p),
            fmt_f64(row.lp_error),
            fmt_f64(row.lp_error_stderr),
            fmt_f64(row.lp_norm_r),
            row.samples,
            row.seed
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{ComplexRational, Rational};
    use crate::multiindex::{c_constant_inv, enumerate_upto};
    use crate::sphere_poly::moment;

    fn mi(c: &[u32]) -> MultiIndex {
        MultiIndex::new(c.iter().copied()).unwrap()
    }

    fn one() -> ComplexRational {
        ComplexRational::one()
    }

    fn mono(mu: &[u32], nu: &[u32]) -> SpherePolynomial {
        SpherePolynomial::monomial(mi(mu), mi(nu), one()).unwrap()
    }

    fn pt(parts: &[(f64, f64)]) -> CPoint {
        CPoint::from_parts(parts).unwrap()
    }

    fn q(n: i64, d: i64) -> ComplexRational {
        ComplexRational::real(Rational::new(n, d).unwrap())
    }

    /// `(1−|z|²)ⁿ Σ_{|υ|,|ω| ≤ N} c_ω⁻¹ c_υ⁻¹ z^ω z̄^υ moment(f, υ, ω)`, summed
    /// pair by pair with exact moments.
    fn naive_poisson(f: &SpherePolynomial, z: &CPoint, order: u32) -> Complex64 {
        let n = f.dim();
        let idx = enumerate_upto(n, order);
        let zbar: Vec<Complex64> = z.coords().iter().map(|c| c.conj()).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for omega in &idx {
            for upsilon in &idx {
                let m = moment(f, upsilon, omega).unwrap();
                if m.is_zero() {
                    continue;
                }
                let k = (c_constant_inv(omega) * c_constant_inv(upsilon)).to_f64().unwrap();
                acc += m.to_complex64().unwrap() * k * omega.pow(z.coords()) * upsilon.pow(&zbar);
            }
        }
        let r2: f64 = z.coords().iter().map(|c| c.norm_sqr()).sum();
        acc * (1.0 - r2).powi(n as i32)
    }

    #[test]
    fn cauchy_transform_examples() {
        let g = cauchy_transform_poly(&mono(&[2, 1], &[0, 0]));
        assert_eq!(g, HolomorphicPolynomial::from_terms(2, [(mi(&[2, 1]), one())]).unwrap());
        assert!(cauchy_transform_poly(&mono(&[0, 0], &[1, 0])).is_empty());
        let g = cauchy_transform_poly(&mono(&[1, 0], &[1, 0]));
        assert_eq!(g, HolomorphicPolynomial::from_terms(2, [(mi(&[0, 0]), q(1, 2))]).unwrap());
        // ζ₁²ζ̄₁ → c_(2,0)/c_(1,0) z₁ = (1/3)/(1/2) z₁
        let g = cauchy_transform_poly(&mono(&[2, 0], &[1, 0]));
        assert_eq!(g, HolomorphicPolynomial::from_terms(2, [(mi(&[1, 0]), q(2, 3))]).unwrap());
    }

    #[test]
    fn cauchy_transform_is_idempotent_and_respects_the_sphere_relation() {
        let f = SpherePolynomial::from_terms(
            2,
            [
                (mi(&[2, 1]), mi(&[1, 0]), q(3, 4)),
                (mi(&[0, 1]), mi(&[1, 1]), q(-1, 2)),
                (mi(&[1, 1]), mi(&[0, 1]), q(5, 1)),
            ],
        )
        .unwrap();
        let g = cauchy_transform_poly(&f);
        assert_eq!(cauchy_transform_poly(&SpherePolynomial::from_holomorphic(&g)), g);
        let lifted = f.checked_mul(&SpherePolynomial::sphere_relation(2).unwrap()).unwrap();
        assert_eq!(cauchy_transform_poly(&lifted), g);
    }

    #[test]
    fn eval_holo_examples() {
        let z1 = HolomorphicPolynomial::from_terms(2, [(mi(&[1, 0]), one())]).unwrap();
        assert_eq!(eval_holo(&z1, &pt(&[(0.5, 0.0), (0.0, 0.0)])).unwrap(), Complex64::new(0.5, 0.0));
        let c = HolomorphicPolynomial::from_terms(2, [(mi(&[0, 0]), one())]).unwrap();
        let z = pt(&[(0.3, -0.2), (0.1, 0.4)]);
        assert_eq!(eval_holo(&c, &z).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(eval_holo(&HolomorphicPolynomial::zero(2).unwrap(), &z).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn poisson_series_examples() {
        let z = pt(&[(0.3, -0.2), (0.1, 0.4)]);
        // the truncation of P[1] is (1−|z|²)ⁿ Σ_{j≤N} binom(j+n−1, n−1)|z|^{2j}, short of 1 by at most the bound
        for order in [0, 1, 5] {
            let (v, t) = poisson_series_eval(&SpherePolynomial::constant(2, one()).unwrap(), &z, order).unwrap();
            assert!((v - 1.0).norm() <= t && v.re <= 1.0);
        }
        let (v, t) = poisson_series_eval(&SpherePolynomial::constant(2, one()).unwrap(), &z, 60).unwrap();
        assert!((v - 1.0).norm() <= t + 1e-14);
        let half = pt(&[(0.5, 0.0), (0.0, 0.0)]);
        let (v, t) = poisson_series_eval(&mono(&[1, 0], &[0, 0]), &half, 40).unwrap();
        assert!((v - 0.5).norm() <= t + 1e-14, "{v} {t}");
        let (v, t) = poisson_series_eval(&mono(&[0, 0], &[1, 0]), &half, 12).unwrap();
        assert!((v - 0.5).norm() <= t + 1e-14, "{v} {t}");
        // |ζ₁|² at the centre averages to 1/2
        let (v, _) = poisson_series_eval(&mono(&[1, 0], &[1, 0]), &CPoint::origin(2), 3).unwrap();
        assert!((v - 0.5).norm() < 1e-15);
        assert!(matches!(
            poisson_series_eval(&mono(&[1, 0], &[0, 0]), &pt(&[(1.0, 0.0), (0.0, 0.0)]), 4),
            Err(Error::OutsideBall(_))
        ));
    }

    #[test]
    fn grouped_series_matches_pairwise_sum() {
        let f = SpherePolynomial::from_terms(
            2,
            [
                (mi(&[2, 1]), mi(&[1, 0]), q(3, 4)),
                (mi(&[0, 1]), mi(&[1, 1]), ComplexRational::new(Rational::from(1), Rational::new(-1, 2).unwrap())),
                (mi(&[1, 1]), mi(&[1, 1]), q(5, 1)),
                (mi(&[0, 0]), mi(&[0, 2]), q(-2, 3)),
            ],
        )
        .unwrap();
        let mut s = SphereSampler::new(2, 12).unwrap();
        for order in [0, 1, 2, 3, 6] {
            for _ in 0..4 {
                let z = s.sample().scaled(0.6);
                let (grouped, _) = poisson_series_eval(&f, &z, order).unwrap();
                let naive = naive_poisson(&f, &z, order);
                assert!((grouped - naive).norm() <= 1e-12 * naive.norm().max(1.0), "N={order}: {grouped} vs {naive}");
            }
        }
        let f3 = SpherePolynomial::from_terms(
            3,
            [(mi(&[1, 0, 2]), mi(&[0, 1, 1]), q(1, 1)), (mi(&[0, 1, 0]), mi(&[1, 0, 0]), q(2, 1))],
        )
        .unwrap();
        let mut s = SphereSampler::new(3, 13).unwrap();
        for order in [2, 4] {
            let z = s.sample().scaled(0.5);
            let (grouped, _) = poisson_series_eval(&f3, &z, order).unwrap();
            let naive = naive_poisson(&f3, &z, order);
            assert!((grouped - naive).norm() <= 1e-12 * naive.norm().max(1.0));
        }
    }

    #[test]
    fn series_converges_to_kernel_integral() {
        let f = SpherePolynomial::from_terms(
            2,
            [(mi(&[1, 1]), mi(&[1, 1]), q(1, 1)), (mi(&[0, 1]), mi(&[2, 0]), q(-3, 2))],
        )
        .unwrap();
        let z = pt(&[(0.4, 0.1), (-0.2, 0.3)]);
        let order = order_for_tolerance(&f, z.norm(), 1e-10).unwrap();
        let (v, t) = poisson_series_eval(&f, &z, order).unwrap();
        assert!(t < 1e-10);
        let fc = f.clone();
        let mc = poisson_transform_mc(move |zeta| fc.eval(zeta).unwrap(), &z, &mut SphereSampler::new(2, 77).unwrap(), 200_000)
            .unwrap();
        assert!(mc.within(v, 4.0), "{mc:?} vs {v}");
    }

    #[test]
    fn holomorphic_data_is_reproduced() {
        let f = SpherePolynomial::from_terms(
            2,
            [(mi(&[2, 0]), mi(&[0, 0]), q(1, 3)), (mi(&[0, 1]), mi(&[0, 0]), q(-2, 1)), (mi(&[0, 0]), mi(&[0, 0]), q(1, 1))],
        )
        .unwrap();
        let g = cauchy_transform_poly(&f);
        let mut s = SphereSampler::new(2, 3).unwrap();
        for _ in 0..10 {
            let z = s.sample().scaled(0.7);
            let order = order_for_tolerance(&f, 0.7, 1e-12).unwrap();
            let (v, t) = poisson_series_eval(&f, &z, order).unwrap();
            assert!((v - eval_holo(&g, &z).unwrap()).norm() <= t + 1e-12);
        }
    }

    #[test]
    fn order_selection() {
        let f = mono(&[0, 0], &[1, 0]);
        assert_eq!(order_for_tolerance(&f, 0.0, 1e-8).unwrap(), 0);
        let mut prev = 0;
        for r in [0.1, 0.5, 0.9, 0.99] {
            let order = order_for_tolerance(&f, r, 1e-8).unwrap();
            assert!(poisson_tail_bound(&f, r, order).unwrap() < 1e-8);
            assert!(order == 0 || poisson_tail_bound(&f, r, order - 1).unwrap() >= 1e-8);
            assert!(order >= prev);
            prev = order;
        }
        assert!(order_for_tolerance(&f, 1.0, 1e-8).is_err());
    }

    #[test]
    fn expansion_rejects_points_off_its_sphere() {
        let f = mono(&[1, 0], &[0, 0]);
        let exp = PoissonExpansion::new(&f, 0.5, 10).unwrap();
        assert!(exp.eval(&pt(&[(0.5, 0.0), (0.0, 0.0)])).is_ok());
        assert!(matches!(exp.eval(&pt(&[(0.4, 0.0), (0.0, 0.0)])), Err(Error::Precondition(_))));
        assert!(exp.eval(&pt(&[(0.5, 0.0)])).is_err());
    }

    #[test]
    fn mc_transform_examples() {
        let mut s = SphereSampler::new(2, 99).unwrap();
        let z = pt(&[(0.3, 0.0), (0.0, 0.1)]);
        let c1 = cauchy_transform_mc(|_| Complex64::new(1.0, 0.0), &z, &mut s, 100_000).unwrap();
        assert!(c1.within(Complex64::new(1.0, 0.0), 4.0), "{c1:?}");
        let cbar = cauchy_transform_mc(|zeta| zeta.coords()[0].conj(), &z, &mut s, 100_000).unwrap();
        assert!(cbar.within(Complex64::new(0.0, 0.0), 4.0), "{cbar:?}");
        let half = pt(&[(0.5, 0.0), (0.0, 0.0)]);
        let cz = cauchy_transform_mc(|zeta| zeta.coords()[0], &half, &mut s, 100_000).unwrap();
        assert!(cz.within(Complex64::new(0.5, 0.0), 4.0), "{cz:?}");

        let p1 = poisson_transform_mc(|_| Complex64::new(1.0, 0.0), &z, &mut s, 100_000).unwrap();
        assert!(p1.within(Complex64::new(1.0, 0.0), 4.0), "{p1:?}");
        let pbar = poisson_transform_mc(|zeta| zeta.coords()[0].conj(), &half, &mut s, 100_000).unwrap();
        assert!(pbar.within(Complex64::new(0.5, 0.0), 4.0), "{pbar:?}");

        let g = |zeta: &SpherePoint| zeta.coords()[0] * zeta.coords()[1].conj() + 2.0;
        let at0 = poisson_transform_mc(g, &CPoint::origin(2), &mut SphereSampler::new(2, 5).unwrap(), 10_000).unwrap();
        let mean = montecarlo::estimate(&mut SphereSampler::new(2, 5).unwrap(), 10_000, |zeta| Ok(g(zeta))).unwrap();
        assert_eq!(at0.value, mean.value);

        assert!(matches!(
            poisson_transform_mc(|_| Complex64::new(1.0, 0.0), &pt(&[(1.0, 0.0), (0.0, 0.0)]), &mut s, 10),
            Err(Error::OutsideBall(_))
        ));
        assert!(matches!(
            cauchy_transform_mc(|_| Complex64::new(f64::NAN, 0.0), &z, &mut s, 10),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn radial_scan_of_conjugate_coordinate() {
        let f = mono(&[0, 0], &[1, 0]);
        let radii = [0.5, 0.9, 0.99];
        let rows = radial_scan(&f, 2.0, &radii, &mut SphereSampler::new(2, 11).unwrap(), 20_000).unwrap();
        assert_eq!(rows.len(), 3);
        let mut prev = f64::INFINITY;
        for row in &rows {
            let truth = (1.0 - row.r) / 2f64.sqrt();
            assert!((row.lp_error - truth).abs() <= 4.0 * row.lp_error_stderr, "{row:?}");
            assert!(row.lp_norm_r <= row.f_norm + 4.0 * row.lp_norm_r_stderr);
            assert!(row.lp_error < prev);
            prev = row.lp_error;
        }
        let again = radial_scan(&f, 2.0, &radii, &mut SphereSampler::new(2, 11).unwrap(), 20_000).unwrap();
        assert_eq!(rows, again);
        let csv = radial_scan_csv(&rows);
        assert!(csv.starts_with("r,p,lp_error,lp_error_stderr,lp_norm_r,samples,seed\n5.0000000000000000e-1,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn radial_scan_preconditions() {
        let f = mono(&[1, 0], &[0, 0]);
        let mut s = SphereSampler::new(2, 1).unwrap();
        assert!(radial_scan(&f, 0.5, &[0.5], &mut s, 100).is_err());
        assert!(matches!(radial_scan(&f, 2.0, &[1.0], &mut s, 100), Err(Error::OutsideBall(_))));
        assert!(radial_scan(&f, 2.0, &[0.5], &mut s, 1).is_err());
        assert!(radial_scan(&f, 2.0, &[0.5], &mut SphereSampler::new(3, 1).unwrap(), 100).is_err());
    }

    #[test]
    fn holomorphic_slice_norms_grow_with_radius() {
        let f = SpherePolynomial::from_terms(2, [(mi(&[1, 1]), mi(&[0, 0]), q(1, 1)), (mi(&[0, 0]), mi(&[0, 0]), q(1, 2))])
            .unwrap();
        let rows = radial_scan(&f, 3.0, &[0.2, 0.6, 0.95], &mut SphereSampler::new(2, 4).unwrap(), 20_000).unwrap();
        for w in rows.windows(2) {
            assert!(w[0].lp_norm_r <= w[1].lp_norm_r);
        }
        let last = rows.last().unwrap();
        assert!(last.lp_norm_r <= last.f_norm);
    }
}
