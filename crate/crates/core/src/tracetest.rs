//! Exact moment conditions and the membership decision.
//!
//! For a pair of multi-indices `(α, β)` exactly one of two cases holds:
//! some `α_j > β_j` (condition A: the moment `∫ζ^α ζ̄^β f` vanishes), or
//! `β ≥ α` (condition B: `c_β⁻¹ ∫ζ^α ζ̄^β f = c_{β−α}⁻¹ ∫ζ̄^{β−α} f`).
//!
//! Membership itself is decided by the exact residual `‖f − C[f]‖²` of the
//! Szegő projection. Sweeps over pairs are the verification harness and
//! produce the violated condition that certifies a non-member.
//!
//! # Escalation always stops
//!
//! Let `D` be the largest `max(|μ|, |ν|)` over the terms of `f` and
//! `h = f − C[f]`, which is orthogonal to every holomorphic polynomial. If
//! `h ≠ 0` then `0 < ‖h‖² = Σ conj(a_{μν}) ∫ζ^ν ζ̄^μ h`, so some
//! `∫ζ^α ζ̄^β h ≠ 0` with `|α|, |β| ≤ D`. For an A pair the holomorphic part
//! has zero moment there, so A fails for `f`. For a B pair the right side for
//! `h` is `c⁻¹ ⟨h, ζ^{β−α}⟩ = 0` while the left side is not, and holomorphic
//! polynomials satisfy B, so B fails for `f`. A sweep of order `D` therefore
//! finds a violation.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{ComplexRational, Rational};
use crate::multiindex::{c_constant_inv, enumerate_upto, MultiIndex};
use crate::sphere_poly::{l2_norm_sq, moment, HolomorphicPolynomial, SpherePolynomial};
use crate::transforms::cauchy_transform_poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionKind {
    A,
    B,
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionKind::A => "A",
            ConditionKind::B => "B",
        })
    }
}

/// One evaluated moment condition; `satisfied` iff `lhs = rhs` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub lhs: ComplexRational,
    pub rhs: ComplexRational,
    pub satisfied: bool,
}

impl ConditionReport {
    fn new(kind: ConditionKind, alpha: &MultiIndex, beta: &MultiIndex, lhs: ComplexRational, rhs: ComplexRational) -> Self {
        let satisfied = lhs == rhs;
        ConditionReport { kind, alpha: alpha.clone(), beta: beta.clone(), lhs, rhs, satisfied }
    }

    /// `|lhs − rhs|²`, exact.
    pub fn discrepancy(&self) -> Rational {
        (&self.lhs - &self.rhs).norm_sqr()
    }
}

impl Serialize for ConditionReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let float = |z: &ComplexRational| z.to_complex64().unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        struct F(Complex64);
        impl Serialize for F {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                crate::report::ser_complex(&self.0, s)
            }
        }
        let mut st = serializer.serialize_struct("ConditionReport", 8)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("beta", &self.beta)?;
        st.serialize_field("lhs", &self.lhs)?;
        st.serialize_field("rhs", &self.rhs)?;
        st.serialize_field("lhs_float", &F(float(&self.lhs)))?;
        st.serialize_field("rhs_float", &F(float(&self.rhs)))?;
        st.serialize_field("satisfied", &self.satisfied)?;
        st.end()
    }
}

/// Condition A at `(α, β)`: `∫ζ^α ζ̄^β f dσ = 0`. Needs some `α_j > β_j`.
pub fn check_condition_a(f: &SpherePolynomial, alpha: &MultiIndex, beta: &MultiIndex) -> Result<ConditionReport> {
    if beta.dominates(alpha)? {
        return Err(Error::Precondition(format!("condition A needs some α_j > β_j, got α={alpha}, β={beta}")));
    }
    Ok(ConditionReport::new(ConditionKind::A, alpha, beta, moment(f, alpha, beta)?, ComplexRational::zero()))
}

/// Condition B at `(α, β)` with `β ≥ α`.
pub fn check_condition_b(f: &SpherePolynomial, alpha: &MultiIndex, beta: &MultiIndex) -> Result<ConditionReport> {
    if !beta.dominates(alpha)? {
        return Err(Error::Precondition(format!("condition B needs β ≥ α, got α={alpha}, β={beta}")));
    }
    let lambda = beta.sub_checked(alpha)?;
    let lhs = moment(f, alpha, beta)?.scale(&c_constant_inv(beta));
    let rhs = moment(f, &MultiIndex::zero(alpha.dim()), &lambda)?.scale(&c_constant_inv(&lambda));
    Ok(ConditionReport::new(ConditionKind::B, alpha, beta, lhs, rhs))
}

/// Whichever condition applies to `(α, β)`.
pub fn check_pair(f: &SpherePolynomial, alpha: &MultiIndex, beta: &MultiIndex) -> Result<ConditionReport> {
    let dominated = beta.dominates(alpha)?;
    let exceeds = alpha.components().iter().zip(beta.components()).any(|(a, b)| a > b);
    assert!(dominated != exceeds, "every pair is exactly one of A or B: α={alpha}, β={beta}");
    if dominated {
        check_condition_b(f, alpha, beta)
    } else {
        check_condition_a(f, alpha, beta)
    }
}

/// Every violated condition with `|α|, |β| ≤ max_order`, in graded-lex order of
/// `α`, then `β`.
pub fn sweep(f: &SpherePolynomial, max_order: u32) -> Result<Vec<ConditionReport>> {
    let indices = enumerate_upto(f.dim(), max_order);
    let per_alpha = indices
        .par_iter()
        .map(|alpha| {
            let mut found = Vec::new();
            for beta in &indices {
                let report = check_pair(f, alpha, beta)?;
                if !report.satisfied {
                    found.push(report);
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_alpha.into_iter().flatten().collect())
}

/// `(‖f − C[f]‖², C[f])`, both exact.
pub fn szego_residual(f: &SpherePolynomial) -> (Rational, HolomorphicPolynomial) {
    let g = cauchy_transform_poly(f);
    let diff = f.checked_sub(&SpherePolynomial::from_holomorphic(&g)).expect("same dimension");
    (l2_norm_sq(&diff), g)
}

/// The outcome of [`is_boundary_trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCertificate {
    pub member: bool,
    pub residual_sq: Rational,
    /// `C[f]`, whose boundary values are `f`; present iff `member`.
    pub witness_extension: Option<HolomorphicPolynomial>,
    /// The violation with the largest `|lhs − rhs|` at the first order that had any.
    pub violation: Option<ConditionReport>,
    pub violation_order: Option<u32>,
    /// Sweep orders run, in sequence.
    pub orders_tried: Vec<u32>,
}

impl Serialize for MembershipCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MembershipCertificate", 7)?;
        st.serialize_field("member", &self.member)?;
        st.serialize_field("residual_sq", &self.residual_sq)?;
        st.serialize_field("residual_sq_float", &self.residual_sq.to_f64().unwrap_or(f64::NAN))?;
        if let Some(w) = &self.witness_extension {
            st.serialize_field("witness_extension", w)?;
        }
        if let Some(v) = &self.violation {
            st.serialize_field("violation", v)?;
        }
        if let Some(o) = &self.violation_order {
            st.serialize_field("violation_order", o)?;
        }
        st.serialize_field("orders_tried", &self.orders_tried)?;
        st.end()
    }
}

/// Largest `max(|μ|, |ν|)` over the terms of `f`.
fn violation_bound(f: &SpherePolynomial) -> u32 {
    f.terms().map(|(mu, nu, _)| mu.degree().max(nu.degree())).max().unwrap_or(0)
}

/// Decides whether `f` is the boundary trace of a holomorphic function.
///
/// Non-members are swept at `sweep_order`, `sweep_order + 2`, … until a
/// violation turns up, which happens by order `max(|μ|, |ν|)` at the latest.
pub fn is_boundary_trace(f: &SpherePolynomial, sweep_order: u32) -> Result<MembershipCertificate> {
    let (residual_sq, g) = szego_residual(f);
    if residual_sq.is_zero() {
        return Ok(MembershipCertificate {
            member: true,
            residual_sq,
            witness_extension: Some(g),
            violation: None,
            violation_order: None,
            orders_tried: Vec::new(),
        });
    }
    let cap = sweep_order.max(violation_bound(f)) + 2;
    let mut orders_tried = Vec::new();
    let mut order = sweep_order;
    while order <= cap {
        orders_tried.push(order);
        let found = sweep(f, order)?;
        let mut best: Option<(Rational, ConditionReport)> = None;
        for report in found {
            let d = report.discrepancy();
            if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                best = Some((d, report));
            }
        }
        if let Some((_, report)) = best {
            return Ok(MembershipCertificate {
                member: false,
                residual_sq,
                witness_extension: None,
                violation: Some(report),
                violation_order: Some(order),
                orders_tried,
            });
        }
        order += 2;
    }
    unreachable!("a non-member always violates a condition by order {cap}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::PolyGenerator;
    use std::collections::BTreeMap;

    fn mi(c: &[u32]) -> MultiIndex {
        MultiIndex::new(c.iter().copied()).unwrap()
    }

    fn q(n: i64, d: i64) -> ComplexRational {
        ComplexRational::real(Rational::new(n, d).unwrap())
    }

    fn mono(mu: &[u32], nu: &[u32]) -> SpherePolynomial {
        SpherePolynomial::monomial(mi(mu), mi(nu), ComplexRational::one()).unwrap()
    }

    fn counterexample() -> SpherePolynomial {
        mono(&[1, 1], &[1, 1])
    }

    #[test]
    fn condition_a_examples() {
        let r = check_condition_a(&mono(&[0, 0], &[1, 0]), &mi(&[1, 0]), &mi(&[0, 0])).unwrap();
        assert_eq!(r.lhs, q(1, 2));
        assert!(!r.satisfied);
        assert_eq!(r.rhs, ComplexRational::zero());
        let z1 = mono(&[1, 0], &[0, 0]);
        for alpha in enumerate_upto(2, 4) {
            for beta in enumerate_upto(2, 4) {
                if !beta.dominates(&alpha).unwrap() {
                    assert!(check_condition_a(&z1, &alpha, &beta).unwrap().satisfied);
                }
            }
        }
        let zero = SpherePolynomial::zero(2).unwrap();
        assert!(check_condition_a(&zero, &mi(&[2, 0]), &mi(&[0, 1])).unwrap().satisfied);
        assert!(matches!(check_condition_a(&z1, &mi(&[0, 0]), &mi(&[1, 0])), Err(Error::Precondition(_))));
    }

    #[test]
    fn condition_b_examples() {
        let r = check_condition_b(&counterexample(), &mi(&[1, 1]), &mi(&[1, 1])).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (q(1, 5), q(1, 6)));
        assert!(!r.satisfied);
        let r = check_condition_b(&mono(&[1, 0], &[0, 0]), &mi(&[0, 0]), &mi(&[1, 0])).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (q(1, 1), q(1, 1)));
        assert!(r.satisfied);
        assert!(matches!(
            check_condition_b(&counterexample(), &mi(&[1, 0]), &mi(&[0, 1])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sweep_examples() {
        let holo = SpherePolynomial::from_terms(
            2,
            [(mi(&[2, 1]), mi(&[0, 0]), q(3, 2)), (mi(&[0, 1]), mi(&[0, 0]), q(-1, 1))],
        )
        .unwrap();
        assert!(sweep(&holo, 5).unwrap().is_empty());
        let found = sweep(&counterexample(), 2).unwrap();
        assert!(found.iter().any(|r| r.kind == ConditionKind::B && r.alpha == mi(&[1, 1]) && r.beta == mi(&[1, 1])));
        let found = sweep(&mono(&[0, 0], &[1, 0]), 1).unwrap();
        assert!(found.iter().any(|r| r.kind == ConditionKind::A && r.alpha == mi(&[1, 0]) && r.beta == mi(&[0, 0])));
        // graded-lex order of (α, β)
        let keys: Vec<_> = sweep(&counterexample(), 3).unwrap().into_iter().map(|r| (r.alpha, r.beta)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn szego_residual_examples() {
        let (res, g) = szego_residual(&mono(&[1, 0], &[1, 0]));
        assert_eq!(res, Rational::new(1, 12).unwrap());
        assert_eq!(g, HolomorphicPolynomial::from_terms(2, [(mi(&[0, 0]), q(1, 2))]).unwrap());
        let (res, g) = szego_residual(&SpherePolynomial::sphere_relation(2).unwrap());
        assert!(res.is_zero());
        assert_eq!(g, HolomorphicPolynomial::from_terms(2, [(mi(&[0, 0]), q(1, 1))]).unwrap());
        let (res, g) = szego_residual(&mono(&[0, 0], &[1, 0]));
        assert_eq!(res, Rational::new(1, 2).unwrap());
        assert!(g.is_empty());
    }

    #[test]
    fn certificate_examples() {
        let c = is_boundary_trace(&mono(&[2, 1], &[0, 0]), 2).unwrap();
        assert!(c.member && c.violation.is_none());
        assert_eq!(c.witness_extension.unwrap(), HolomorphicPolynomial::from_terms(2, [(mi(&[2, 1]), q(1, 1))]).unwrap());

        let c = is_boundary_trace(&counterexample(), 2).unwrap();
        assert!(!c.member);
        assert!(c.witness_extension.is_none());
        let v = c.violation.unwrap();
        assert_eq!((v.kind, v.alpha, v.beta), (ConditionKind::B, mi(&[1, 1]), mi(&[1, 1])));
        assert_eq!((v.lhs, v.rhs), (q(1, 5), q(1, 6)));
        assert_eq!(c.violation_order, Some(2));

        let c = is_boundary_trace(&SpherePolynomial::sphere_relation(2).unwrap(), 2).unwrap();
        assert!(c.member);
        assert_eq!(c.witness_extension.unwrap(), HolomorphicPolynomial::from_terms(2, [(mi(&[0, 0]), q(1, 1))]).unwrap());

        // starting below the violating order forces escalation
        let c = is_boundary_trace(&mono(&[0, 0], &[0, 3]), 0).unwrap();
        assert_eq!(c.orders_tried, vec![0, 2, 4]);
        assert_eq!(c.violation_order, Some(4));
    }

    #[test]
    fn certificate_json() {
        let c = is_boundary_trace(&mono(&[1, 0], &[1, 0]), 2).unwrap();
        let json = crate::report::to_json(&c).unwrap();
        assert!(json.contains(r#""residual_sq":"1/12""#), "{json}");
        assert!(json.contains(r#""member":false"#));
        let c = is_boundary_trace(&counterexample(), 2).unwrap();
        let json = crate::report::to_json(&c).unwrap();
        assert!(json.contains(r#""lhs":{"re":"1/5","im":"0/1"}"#), "{json}");
        assert!(json.contains(r#""rhs_float":{"re":1.6666666666666666e-1"#), "{json}");
    }

    /// Laurent coefficients of an `n = 1` polynomial, using `ζζ̄ = 1`.
    fn laurent(f: &SpherePolynomial) -> BTreeMap<i64, ComplexRational> {
        let mut out: BTreeMap<i64, ComplexRational> = BTreeMap::new();
        for (mu, nu, a) in f.terms() {
            let k = i64::from(mu.degree()) - i64::from(nu.degree());
            *out.entry(k).or_insert_with(ComplexRational::zero) += a;
        }
        out.retain(|_, a| !a.is_zero());
        out
    }

    #[test]
    fn one_variable_reduces_to_negative_fourier_coefficients() {
        let mut gen = PolyGenerator::new(31);
        for _ in 0..25 {
            let f = gen.sphere_poly(1, 6, 5);
            let coeffs = laurent(&f);
            let found = sweep(&f, 8).unwrap();
            assert!(found.iter().all(|r| r.kind == ConditionKind::A));
            for r in &found {
                let k = i64::from(r.beta.degree()) - i64::from(r.alpha.degree());
                assert!(coeffs.contains_key(&k));
            }
            for (&k, _) in coeffs.range(..0) {
                if -k <= 8 {
                    assert!(found.iter().any(|r| i64::from(r.beta.degree()) - i64::from(r.alpha.degree()) == k));
                }
            }
            let negative: Rational = coeffs.range(..0).map(|(_, a)| a.norm_sqr()).sum();
            let (res, _) = szego_residual(&f);
            assert_eq!(res, negative);
        }
    }

    #[test]
    fn soundness_both_ways() {
        let mut gen = PolyGenerator::new(5);
        for i in 0..40 {
            let n = 1 + i % 3;
            let f = if i % 2 == 0 { gen.member(n, 3) } else { gen.sphere_poly(n, 4, 4) };
            let (res, _) = szego_residual(&f);
            let order = if n == 3 { 5 } else { 8 };
            let found = sweep(&f, order).unwrap();
            if res.is_zero() {
                assert!(found.is_empty(), "{f}: {:?}", found.first());
            } else {
                assert!(res.is_positive());
            }
            if !found.is_empty() {
                assert!(res.is_positive());
            }
        }
    }

    #[test]
    fn sphere_relation_and_linearity() {
        let mut gen = PolyGenerator::new(8);
        for i in 0..20 {
            let n = 1 + i % 3;
            let f = if i % 2 == 0 { gen.member(n, 3) } else { gen.sphere_poly(n, 3, 4) };
            let lifted = f.checked_mul(&SpherePolynomial::sphere_relation(n).unwrap()).unwrap();
            let a = is_boundary_trace(&f, 2).unwrap();
            let b = is_boundary_trace(&lifted, 2).unwrap();
            assert_eq!(a.member, b.member);
            assert_eq!(a.witness_extension, b.witness_extension);

            let g = gen.member(n, 3);
            let h = gen.member(n, 3);
            let combo = g.scale(&gen.coefficient()).checked_add(&h.scale(&gen.coefficient())).unwrap();
            assert!(is_boundary_trace(&combo, 2).unwrap().member);
        }
    }

    #[test]
    fn non_members_get_certificates() {
        let mut gen = PolyGenerator::new(21);
        for i in 0..20 {
            let f = gen.non_member(1 + i % 3, 4);
            let c = is_boundary_trace(&f, 2).unwrap();
            assert!(!c.member);
            let v = c.violation.unwrap();
            assert!(!v.satisfied);
            assert_eq!(check_pair(&f, &v.alpha, &v.beta).unwrap(), v);
        }
    }
}
