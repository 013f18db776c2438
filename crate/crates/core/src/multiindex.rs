//! Multi-indices and the sphere constants `c_ω = (n-1)! ω! / (n-1+|ω|)!`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exactnum::Rational;

type Components = SmallVec<[u32; 4]>;

/// An exponent vector `(α_1, …, α_n)` with `n ≥ 1`.
///
/// Ordering is graded lexicographic: total degree first, then the component
/// vector in descending lexicographic order, so `(0,0) < (1,0) < (0,1) < (2,0)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    comps: Components,
}

impl MultiIndex {
    pub fn new(comps: impl IntoIterator<Item = u32>) -> Result<Self> {
        let comps: Components = comps.into_iter().collect();
        if comps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(MultiIndex { comps })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n > 0, "multi-index dimension must be positive");
        MultiIndex { comps: SmallVec::from_elem(0, n) }
    }

    /// The `k`-th unit index `e_k` (0-based).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut m = Self::zero(n);
        m.comps[k] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.comps
    }

    pub fn degree(&self) -> u32 {
        self.comps.iter().sum()
    }

    pub fn factorial(&self) -> BigInt {
        self.comps.iter().map(|&a| factorial(a)).product()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|&a| a == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(MultiIndex {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    /// True iff `self_j ≥ other_j` for every `j`.
    pub fn dominates(&self, other: &MultiIndex) -> Result<bool> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(self.comps.iter().zip(&other.comps).all(|(b, a)| b >= a))
    }

    /// `self − other`, defined only when `self` dominates `other`.
    pub fn sub_checked(&self, other: &MultiIndex) -> Result<MultiIndex> {
        if !self.dominates(other)? {
            return Err(Error::NotDominated { beta: self.to_string(), alpha: other.to_string() });
        }
        Ok(MultiIndex {
            comps: self.comps.iter().zip(&other.comps).map(|(b, a)| b - a).collect(),
        })
    }

    /// Componentwise `max(self − other, 0)` and `max(other − self, 0)`.
    pub fn split_difference(&self, other: &MultiIndex) -> Result<(MultiIndex, MultiIndex)> {
        Error::check_dim(self.dim(), other.dim())?;
        let pos = self.comps.iter().zip(&other.comps).map(|(a, b)| a.saturating_sub(*b)).collect();
        let neg = self.comps.iter().zip(&other.comps).map(|(a, b)| b.saturating_sub(*a)).collect();
        Ok((MultiIndex { comps: pos }, MultiIndex { comps: neg }))
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &MultiIndex) -> Result<MultiIndex> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(MultiIndex {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| *a.min(b)).collect(),
        })
    }

    /// `z^α` in floating point.
    pub fn pow(&self, z: &[num_complex::Complex64]) -> num_complex::Complex64 {
        debug_assert_eq!(z.len(), self.dim());
        z.iter()
            .zip(&self.comps)
            .fold(num_complex::Complex64::new(1.0, 0.0), |acc, (zk, &a)| acc * zk.powu(a))
    }

    /// `x^α` for real `x`.
    pub fn pow_real(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        x.iter().zip(&self.comps).map(|(xk, &a)| xk.powi(a as i32)).product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| other.comps.cmp(&self.comps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.comps.as_slice().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let comps = Vec::<u32>::deserialize(deserializer)?;
        MultiIndex::new(comps).map_err(serde::de::Error::custom)
    }
}

pub fn factorial(k: u32) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// Every multi-index of dimension `n` with `|α| ≤ max_degree`, graded-lex ordered.
pub fn enumerate_upto(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    assert!(n > 0, "multi-index dimension must be positive");
    let mut out = Vec::new();
    for d in 0..=max_degree {
        enumerate_degree(n, d, &mut out);
    }
    out
}

/// Multi-indices of exact degree `d`, in descending lexicographic order.
pub fn enumerate_degree(n: usize, d: u32, out: &mut Vec<MultiIndex>) {
    fn rec(prefix: &mut Components, n: usize, left: u32, out: &mut Vec<MultiIndex>) {
        if prefix.len() == n - 1 {
            prefix.push(left);
            out.push(MultiIndex { comps: prefix.clone() });
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(prefix, n, left - a, out);
            prefix.pop();
        }
    }
    rec(&mut SmallVec::new(), n, d, out);
}

/// `c_ω = (n−1)! ω! / (n−1+|ω|)!`, the value of `∫_S |ζ^ω|² dσ`.
pub fn c_constant(omega: &MultiIndex) -> Rational {
    let n = omega.dim() as u32;
    // (n-1+|ω|)! / (n-1)! = n · (n+1) ⋯ (n-1+|ω|)
    let rising: BigInt = (n..n + omega.degree()).fold(BigInt::one(), |acc, k| acc * k);
    Rational::new(omega.factorial(), rising).expect("rising factorial is positive")
}

/// `1 / c_ω`.
pub fn c_constant_inv(omega: &MultiIndex) -> Rational {
    c_constant(omega).recip().expect("c_ω is positive")
}
