//! Exact certificates for boundary traces of holomorphic functions on the unit
//! ball `B ⊂ ℂⁿ`.
//!
//! A polynomial `f` on the unit sphere `S` is the boundary trace of a
//! holomorphic function on `B` exactly when its moments
//! `∫_S ζ^α ζ̄^β f dσ` satisfy two families of identities:
//!
//! * (A) if `α_j > β_j` for some `j`, the moment vanishes;
//! * (B) if `α ≤ β` componentwise, `c_β⁻¹ ∫ζ^α ζ̄^β f = c_{β−α}⁻¹ ∫ζ̄^{β−α} f`,
//!
//! with `c_ω = (n−1)! ω! / (n−1+|ω|)!`. The [`tracetest`] module checks these
//! identities in exact rational arithmetic and decides membership through the
//! exact residual of the Szegő projection. [`kernels`] and [`transforms`]
//! evaluate the Cauchy and invariant Poisson integrals, and [`montecarlo`]
//! provides the seeded stochastic cross-checks.

pub mod cli;
pub mod error;
pub mod exactnum;
pub mod kernels;
pub mod montecarlo;
pub mod multiindex;
pub mod random;
pub mod report;
pub mod sphere;
pub mod sphere_poly;
pub mod tracetest;
pub mod transforms;

pub use error::{Error, ErrorClass, Result};
pub use exactnum::{ComplexFloat, ComplexRational, Rational};
pub use montecarlo::MCEstimate;
pub use multiindex::{c_constant, enumerate_upto, MultiIndex};
pub use sphere::{CPoint, SpherePoint, SphereSampler};
pub use sphere_poly::{HolomorphicPolynomial, SpherePolynomial};
