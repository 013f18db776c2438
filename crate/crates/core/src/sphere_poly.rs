//! Sphere polynomials `Σ a_{μν} ζ^μ ζ̄^ν` with exact coefficients, their exact
//! moments and `L²(σ)` inner products, and Monte-Carlo moments of black-box
//! functions.
//!
//! Everything exact here reduces to one fact: `∫_S ζ^ω ζ̄^υ dσ` is `c_ω` when
//! `ω = υ` and `0` otherwise.
//!
//! Polynomials are stored as written. Two different polynomials can agree on
//! `S` (for instance `ζ₁ζ̄₁ + ζ₂ζ̄₂` and `1`); whether they do is decided by
//! [`l2_norm_sq`] of their difference, not by normalizing the storage.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ComplexRational, Rational};
use crate::montecarlo::{self, MCEstimate};
use crate::multiindex::{c_constant, MultiIndex};
use crate::sphere::{monomial_unchecked, CPoint, SpherePoint, SphereSampler};

/// A finite sum `Σ a_{μν} ζ^μ ζ̄^ν` on the unit sphere of ℂⁿ.
#[derive(Clone, PartialEq, Eq)]
pub struct SpherePolynomial {
    dim: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), ComplexRational>,
}

impl SpherePolynomial {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(SpherePolynomial { dim, terms: BTreeMap::new() })
    }

    /// Sums the given terms; repeated index pairs are combined and zero
    /// coefficients dropped.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, MultiIndex, ComplexRational)>,
    {
        let mut p = SpherePolynomial::zero(dim)?;
        for (mu, nu, a) in terms {
            p.add_term(mu, nu, &a)?;
        }
        Ok(p)
    }

    pub fn monomial(mu: MultiIndex, nu: MultiIndex, coef: ComplexRational) -> Result<Self> {
        let dim = mu.dim();
        SpherePolynomial::from_terms(dim, [(mu, nu, coef)])
    }

    pub fn constant(dim: usize, c: ComplexRational) -> Result<Self> {
        SpherePolynomial::from_terms(dim, [(MultiIndex::zero(dim), MultiIndex::zero(dim), c)])
    }

    /// `ζ₁ζ̄₁ + … + ζ_nζ̄_n`, which equals 1 on `S`.
    pub fn sphere_relation(dim: usize) -> Result<Self> {
        SpherePolynomial::from_terms(
            dim,
            (0..dim).map(|k| (MultiIndex::unit(dim, k), MultiIndex::unit(dim, k), ComplexRational::one())),
        )
    }

    /// The restriction to `S` of a holomorphic polynomial.
    pub fn from_holomorphic(g: &HolomorphicPolynomial) -> Self {
        let zero = MultiIndex::zero(g.dim);
        SpherePolynomial {
            dim: g.dim,
            terms: g.terms.iter().map(|(mu, a)| ((mu.clone(), zero.clone()), a.clone())).collect(),
        }
    }

    pub fn add_term(&mut self, mu: MultiIndex, nu: MultiIndex, coef: &ComplexRational) -> Result<()> {
        Error::check_dim(self.dim, mu.dim())?;
        Error::check_dim(self.dim, nu.dim())?;
        if coef.is_zero() {
            return Ok(());
        }
        let key = (mu, nu);
        let merged = match self.terms.get(&key) {
            Some(old) => old + coef,
            None => coef.clone(),
        };
        if merged.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, merged);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Terms in graded-lex order of `(μ, ν)`.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &ComplexRational)> {
        self.terms.iter().map(|((mu, nu), a)| (mu, nu, a))
    }

    pub fn coefficient(&self, mu: &MultiIndex, nu: &MultiIndex) -> Option<&ComplexRational> {
        self.terms.get(&(mu.clone(), nu.clone()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No stored terms. A polynomial can vanish on `S` without being empty.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no stored term carries a `ζ̄` factor.
    pub fn is_holomorphic_form(&self) -> bool {
        self.terms.keys().all(|(_, nu)| nu.is_zero())
    }

    /// `(max |μ|, max |ν|)` over the stored terms.
    pub fn bidegree(&self) -> (u32, u32) {
        self.terms
            .keys()
            .fold((0, 0), |(p, q), (mu, nu)| (p.max(mu.degree()), q.max(nu.degree())))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(mu, nu)| mu.degree() + nu.degree()).max().unwrap_or(0)
    }

    /// `Σ |a_{μν}|`, an upper bound for `sup_S |f|`.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms
            .values()
            .map(|a| a.to_complex64().map(|z| z.norm()).unwrap_or(f64::INFINITY))
            .sum()
    }

    pub fn checked_add(&self, other: &SpherePolynomial) -> Result<Self> {
        Error::check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for ((mu, nu), a) in &other.terms {
            out.add_term(mu.clone(), nu.clone(), a)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &SpherePolynomial) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &SpherePolynomial) -> Result<Self> {
        Error::check_dim(self.dim, other.dim)?;
        let mut out = SpherePolynomial::zero(self.dim)?;
        for ((mu, nu), a) in &self.terms {
            for ((mu2, nu2), b) in &other.terms {
                out.add_term(mu.add(mu2)?, nu.add(nu2)?, &(a * b))?;
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-ComplexRational::one())
    }

    pub fn scale(&self, k: &ComplexRational) -> Self {
        if k.is_zero() {
            return SpherePolynomial { dim: self.dim, terms: BTreeMap::new() };
        }
        SpherePolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(key, a)| (key.clone(), a * k)).collect(),
        }
    }

    /// The pointwise complex conjugate `f̄`.
    pub fn conjugate(&self) -> Self {
        SpherePolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|((mu, nu), a)| ((nu.clone(), mu.clone()), a.conj())).collect(),
        }
    }

    pub fn eval(&self, zeta: &SpherePoint) -> Result<Complex64> {
        Error::check_dim(self.dim, zeta.dim())?;
        self.eval_coords(zeta.coords())
    }

    pub(crate) fn eval_coords(&self, z: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((mu, nu), a) in &self.terms {
            acc += a.to_complex64()? * monomial_unchecked(z, mu, nu);
        }
        Ok(acc)
    }

    /// Float coefficients, for repeated evaluation in sampling loops.
    pub(crate) fn float_terms(&self) -> Result<Vec<(MultiIndex, MultiIndex, Complex64)>> {
        self.terms
            .iter()
            .map(|((mu, nu), a)| Ok((mu.clone(), nu.clone(), a.to_complex64()?)))
            .collect()
    }
}

pub(crate) fn eval_float_terms(terms: &[(MultiIndex, MultiIndex, Complex64)], z: &[Complex64]) -> Complex64 {
    terms.iter().map(|(mu, nu, a)| a * monomial_unchecked(z, mu, nu)).sum()
}

impl fmt::Debug for SpherePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SpherePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((mu, nu), a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({a}) ζ^{mu} ζ̄^{nu}")?;
        }
        Ok(())
    }
}

/// A finite power series `Σ b_μ z^μ`.
#[derive(Clone, PartialEq, Eq)]
pub struct HolomorphicPolynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, ComplexRational>,
}

impl HolomorphicPolynomial {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(HolomorphicPolynomial { dim, terms: BTreeMap::new() })
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, ComplexRational)>,
    {
        let mut p = HolomorphicPolynomial::zero(dim)?;
        for (mu, a) in terms {
            p.add_term(mu, &a)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, mu: MultiIndex, coef: &ComplexRational) -> Result<()> {
        Error::check_dim(self.dim, mu.dim())?;
        if coef.is_zero() {
            return Ok(());
        }
        let merged = match self.terms.get(&mu) {
            Some(old) => old + coef,
            None => coef.clone(),
        };
        if merged.is_zero() {
            self.terms.remove(&mu);
        } else {
            self.terms.insert(mu, merged);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mu: &MultiIndex) -> Option<&ComplexRational> {
        self.terms.get(mu)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// `Σ b_μ z^μ` in floating point.
    pub fn eval(&self, z: &CPoint) -> Result<Complex64> {
        Error::check_dim(self.dim, z.dim())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (mu, b) in &self.terms {
            acc += b.to_complex64()? * mu.pow(z.coords());
        }
        Ok(acc)
    }
}

impl fmt::Debug for HolomorphicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (mu, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({a}) z^{mu}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    mu: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nu: Option<Vec<u32>>,
    re: Rational,
    im: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyDoc {
    n: usize,
    terms: Vec<TermDoc>,
}

fn index_from_doc(n: usize, comps: Vec<u32>, what: &str, at: usize) -> Result<MultiIndex> {
    if comps.len() != n {
        return Err(Error::Schema(format!(
            "term {at}: {what} has {} components but n = {n}",
            comps.len()
        )));
    }
    MultiIndex::new(comps).map_err(|e| Error::Schema(format!("term {at}: {e}")))
}

impl Serialize for SpherePolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyDoc {
            n: self.dim,
            terms: self
                .terms
                .iter()
                .map(|((mu, nu), a)| TermDoc {
                    mu: mu.components().to_vec(),
                    nu: Some(nu.components().to_vec()),
                    re: a.re.clone(),
                    im: a.im.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpherePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = PolyDoc::deserialize(deserializer)?;
        SpherePolynomial::from_doc(doc).map_err(serde::de::Error::custom)
    }
}

impl SpherePolynomial {
    fn from_doc(doc: PolyDoc) -> Result<Self> {
        if doc.n == 0 {
            return Err(Error::Schema("n must be positive".into()));
        }
        let mut p = SpherePolynomial::zero(doc.n)?;
        for (i, t) in doc.terms.into_iter().enumerate() {
            let nu = t.nu.ok_or_else(|| Error::Schema(format!("term {i}: missing field `nu`")))?;
            let mu = index_from_doc(doc.n, t.mu, "mu", i)?;
            let nu = index_from_doc(doc.n, nu, "nu", i)?;
            p.add_term(mu, nu, &ComplexRational::new(t.re, t.im))?;
        }
        Ok(p)
    }

    /// Parses the JSON document `{"n": .., "terms": [{"mu": [..], "nu": [..], "re": "p/q", "im": "p/q"}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolyDoc = serde_json::from_str(text).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => {
                Error::Schema(format!("{e}"))
            }
            _ => Error::Parse(format!("{e}")),
        })?;
        SpherePolynomial::from_doc(doc)
    }
}

impl Serialize for HolomorphicPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyDoc {
            n: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(mu, a)| TermDoc { mu: mu.components().to_vec(), nu: None, re: a.re.clone(), im: a.im.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HolomorphicPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = PolyDoc::deserialize(deserializer)?;
        let build = || -> Result<Self> {
            let mut p = HolomorphicPolynomial::zero(doc.n).map_err(|e| Error::Schema(e.to_string()))?;
            for (i, t) in doc.terms.into_iter().enumerate() {
                if t.nu.as_ref().is_some_and(|nu| nu.iter().any(|&x| x != 0)) {
                    return Err(Error::Schema(format!("term {i}: holomorphic term has a nonzero `nu`")));
                }
                p.add_term(index_from_doc(doc.n, t.mu, "mu", i)?, &ComplexRational::new(t.re, t.im))?;
            }
            Ok(p)
        };
        build().map_err(serde::de::Error::custom)
    }
}

/// `∫_S ζ^ω ζ̄^υ dσ`: `c_ω` if `ω = υ`, else 0.
pub fn monomial_integral(omega: &MultiIndex, upsilon: &MultiIndex) -> Result<Rational> {
    Error::check_dim(omega.dim(), upsilon.dim())?;
    Ok(if omega == upsilon { c_constant(omega) } else { Rational::zero() })
}

/// `α + μ = β + ν`, componentwise, without allocating.
fn balanced(alpha: &MultiIndex, mu: &MultiIndex, beta: &MultiIndex, nu: &MultiIndex) -> bool {
    alpha
        .components()
        .iter()
        .zip(mu.components())
        .zip(beta.components().iter().zip(nu.components()))
        .all(|((a, m), (b, n))| a + m == b + n)
}

/// The exact moment `∫_S ζ^α ζ̄^β f dσ`.
pub fn moment(f: &SpherePolynomial, alpha: &MultiIndex, beta: &MultiIndex) -> Result<ComplexRational> {
    Error::check_dim(f.dim(), alpha.dim())?;
    Error::check_dim(f.dim(), beta.dim())?;
    let mut acc = ComplexRational::zero();
    for ((mu, nu), a) in &f.terms {
        if balanced(alpha, mu, beta, nu) {
            acc += &a.scale(&c_constant(&alpha.add(mu)?));
        }
    }
    Ok(acc)
}

/// Monte-Carlo estimate of `∫_S ζ^α ζ̄^β g dσ` for a black-box `g`, drawing
/// `samples` points from `sampler`.
pub fn mc_moment<G>(
    g: G,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    sampler: &mut SphereSampler,
    samples: u64,
) -> Result<MCEstimate>
where
    G: Fn(&SpherePoint) -> Complex64 + Sync,
{
    Error::check_dim(sampler.dim(), alpha.dim())?;
    Error::check_dim(sampler.dim(), beta.dim())?;
    montecarlo::estimate(sampler, samples, |z| {
        let gz = montecarlo::check_value(z, g(z))?;
        Ok(monomial_unchecked(z.coords(), alpha, beta) * gz)
    })
}

/// The exact `L²(S, σ)` inner product `∫_S f ḡ dσ`.
pub fn inner_product(f: &SpherePolynomial, g: &SpherePolynomial) -> Result<ComplexRational> {
    Error::check_dim(f.dim(), g.dim())?;
    let mut acc = ComplexRational::zero();
    for ((mu, nu), a) in &f.terms {
        for ((mu2, nu2), b) in &g.terms {
            // ζ^μ ζ̄^ν · conj(ζ^μ' ζ̄^ν') = ζ^(μ+ν') ζ̄^(ν+μ')
            if balanced(mu, nu2, nu, mu2) {
                acc += &(a * &b.conj()).scale(&c_constant(&mu.add(nu2)?));
            }
        }
    }
    Ok(acc)
}

/// `‖f‖₂² = ∫_S |f|² dσ`, exact.
pub fn l2_norm_sq(f: &SpherePolynomial) -> Rational {
    let ip = inner_product(f, f).expect("same dimension");
    debug_assert!(ip.im.is_zero(), "⟨f,f⟩ must be real");
    ip.re
}

/// `f(ζ)` in floating point.
pub fn eval(f: &SpherePolynomial, zeta: &SpherePoint) -> Result<Complex64> {
    f.eval(zeta)
}
