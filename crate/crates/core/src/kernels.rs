//! Cauchy and invariant Poisson kernels of the unit ball.
//!
//! `C(z,w) = (1 − ⟨z,w⟩)^{−n}` and `P(z,ζ) = (1 − |z|²)ⁿ / |1 − ⟨z,ζ⟩|^{2n}`.
//! The Cauchy kernel also has the power series
//! `C(z,w) = Σ_ω c_ω⁻¹ z^ω w̄^ω = Σ_j binom(j+n−1, n−1) ⟨z,w⟩ʲ`, which
//! [`cauchy_series`] truncates at total degree `N` with a certified bound on
//! what is left out.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::{c_constant_inv, enumerate_upto};
use crate::sphere::{herm_inner, CPoint, SpherePoint};

/// `|1 − ⟨z,w⟩|` at or below this is treated as the kernel singularity.
pub const SINGULARITY_GUARD: f64 = 1e-14;

/// How a kernel series was cut off and how far the cut can move the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelTruncation {
    /// Largest total degree `|ω|` kept.
    pub order: u32,
    /// Bound on the mass of the omitted terms (exact arithmetic).
    pub tail_bound: f64,
    /// Bound on floating-point rounding in the partial sum and the closed form.
    pub rounding_bound: f64,
}

impl KernelTruncation {
    /// Total bound on `|series − closed form|` as computed in `f64`.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// `C(z,w) = 1 / (1 − ⟨z,w⟩)ⁿ`.
pub fn cauchy_kernel(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    let gap = Complex64::new(1.0, 0.0) - herm_inner(z, w)?;
    if gap.norm() <= SINGULARITY_GUARD {
        return Err(Error::Singular { gap: gap.norm() });
    }
    let v = gap.powu(z.dim() as u32).inv();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Singular { gap: gap.norm() })
    }
}

/// `P(z,ζ) = (1 − |z|²)ⁿ / |1 − ⟨z,ζ⟩|^{2n}` for `z ∈ B`.
pub fn poisson_kernel(z: &CPoint, zeta: &SpherePoint) -> Result<f64> {
    Error::check_dim(z.dim(), zeta.dim())?;
    let r = z.norm();
    if r >= 1.0 {
        return Err(Error::OutsideBall(r));
    }
    let n = z.dim() as i32;
    let r2: f64 = z.coords().iter().map(|c| c.norm_sqr()).sum();
    let gap = (Complex64::new(1.0, 0.0) - herm_inner(z, zeta.point())?).norm_sqr();
    Ok(((1.0 - r2) / gap).powi(n))
}

/// `binom(j + n − 1, n − 1)` in floating point.
fn series_weight(j: u32, n: usize) -> f64 {
    (1..n).fold(1.0, |acc, i| acc * (j as f64 + i as f64) / i as f64)
}

/// Upper bound for `Σ_{j>N} binom(j+n−1, n−1) rʲ`.
///
/// Uses `t_{N+1} / (1 − q)` with the ratio bound `q = r(N+n+1)/(N+2)` when
/// `q < 1`, capped by the full sum `(1 − r)^{−n}`, which is also the fallback.
pub fn series_tail_bound(r: f64, order: u32, n: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Divergent(r));
    }
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let full = (1.0 - r).powi(-(n as i32));
    let next = order as f64 + 1.0;
    let q = r * (next + n as f64) / (next + 1.0);
    if q >= 1.0 {
        return Ok(full);
    }
    // t_{N+1} = binom(N+n, n−1) r^{N+1}, formed in log space to dodge overflow
    let log_t = (1..n).map(|i| ((next + i as f64) / i as f64).ln()).sum::<f64>() + next * r.ln();
    Ok((log_t.exp() / (1.0 - q)).min(full))
}

/// `Σ_{|ω| ≤ N} c_ω⁻¹ z^ω w̄^ω`, summed by total degree as
/// `Σ_{j ≤ N} binom(j+n−1, n−1) ⟨z,w⟩ʲ`.
pub fn cauchy_series(z: &CPoint, w: &CPoint, order: u32) -> Result<(Complex64, KernelTruncation)> {
    let x = herm_inner(z, w)?;
    let r = z.norm() * w.norm();
    if r >= 1.0 {
        return Err(Error::Divergent(r));
    }
    let n = z.dim();
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=order {
        sum += power * series_weight(j, n);
        power *= x;
    }
    let tail_bound = series_tail_bound(r, order, n)?;
    let scale = (1.0 - r).powi(-(n as i32));
    let rounding_bound = 4.0 * (order as f64 + 2.0 * n as f64 + 6.0) * f64::EPSILON * scale;
    Ok((sum, KernelTruncation { order, tail_bound, rounding_bound }))
}

/// The same truncation summed index by index, `Σ_{|ω| ≤ N} c_ω⁻¹ z^ω w̄^ω`.
///
/// Costs `O(Nⁿ)`; kept to validate the degree-grouped form.
pub fn cauchy_series_enumerated(z: &CPoint, w: &CPoint, order: u32) -> Result<Complex64> {
    Error::check_dim(z.dim(), w.dim())?;
    let wbar: Vec<Complex64> = w.coords().iter().map(|c| c.conj()).collect();
    enumerate_upto(z.dim(), order)
        .iter()
        .map(|omega| Ok(c_constant_inv(omega).to_f64()? * omega.pow(z.coords()) * omega.pow(&wbar)))
        .sum()
}
