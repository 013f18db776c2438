//! C ABI for `hardy-trace`.
//!
//! Polynomials cross the boundary as opaque [`HtPolynomial`] handles built from
//! the JSON schema. Structured results come back as NUL-terminated JSON (or CSV)
//! strings owned by the library and released with [`ht_string_free`]. Every
//! function returns an [`HtStatus`]; after a failure, [`ht_last_error_message`]
//! describes it. Points in `ℂⁿ` are passed as `2n` doubles, `re, im` interleaved.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hardy_trace::kernels::{cauchy_kernel, poisson_kernel};
use hardy_trace::report::to_json;
use hardy_trace::sphere_poly::{mc_moment, moment};
use hardy_trace::tracetest::{is_boundary_trace, sweep, szego_residual};
use hardy_trace::transforms::{radial_scan, radial_scan_csv};
use hardy_trace::{c_constant, CPoint, Error, ErrorClass, MultiIndex, SpherePoint, SpherePolynomial, SphereSampler};
use hardy_trace::ComplexFloat as Complex64;

/// Result of every call. The first five match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtStatus {
    Ok = 0,
    Usage = 1,
    Domain = 2,
    Numerical = 3,
    Io = 4,
    NullPointer = 5,
    Panic = 6,
}

impl From<ErrorClass> for HtStatus {
    fn from(class: ErrorClass) -> Self {
        match class {
            ErrorClass::Usage => HtStatus::Usage,
            ErrorClass::Domain => HtStatus::Domain,
            ErrorClass::Numerical => HtStatus::Numerical,
            ErrorClass::Io => HtStatus::Io,
        }
    }
}

/// Opaque polynomial handle.
pub struct HtPolynomial(SpherePolynomial);

/// A Monte-Carlo mean and its standard error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtEstimate {
    pub re: f64,
    pub im: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `body`, turning errors and panics into a status and a stored message.
fn guard<F: FnOnce() -> FfiResult<()>>(body: F) -> HtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            HtStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            HtStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            e.class().into()
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(&format!("panic: {msg}"));
            HtStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &'static str) -> FfiResult<&'a T> {
    // SAFETY: callers pass either null or a pointer obtained from this library / valid for reads.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> FfiResult<&'a mut T> {
    // SAFETY: callers pass either null or a pointer valid for writes.
    unsafe { p.as_mut() }.ok_or(Failure::Null(what))
}

fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> FfiResult<&'a [T]> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null, and the caller promises `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn index(p: *const u32, n: usize, what: &'static str) -> FfiResult<MultiIndex> {
    Ok(MultiIndex::new(slice(p, n, what)?.iter().copied())?)
}

fn point(p: *const f64, n: usize, what: &'static str) -> FfiResult<CPoint> {
    let raw = slice(p, 2 * n, what)?;
    Ok(CPoint::new(raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])))?)
}

fn write_string(out: *mut *mut c_char, text: String) -> FfiResult<()> {
    let slot = out_ptr(out, "out")?;
    let c = CString::new(text).map_err(|e| Error::Io(e.to_string()))?;
    *slot = c.into_raw();
    Ok(())
}

/// The message for the most recent failure on this thread, or `""`.
///
/// The pointer stays valid until the next `ht_` call on the same thread.
#[no_mangle]
pub extern "C" fn ht_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ht_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a polynomial document into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_polynomial_from_json(json: *const c_char, out: *mut *mut HtPolynomial) -> HtStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let slot = out_ptr(out, "out")?;
        let text = CStr::from_ptr(json).to_str().map_err(|e| Error::Parse(e.to_string()))?;
        let f = SpherePolynomial::from_json(text)?;
        *slot = Box::into_raw(Box::new(HtPolynomial(f)));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `f` must be null or a live handle from [`ht_polynomial_from_json`].
#[no_mangle]
pub unsafe extern "C" fn ht_polynomial_free(f: *mut HtPolynomial) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// The dimension `n` of a polynomial.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_polynomial_dim(f: *const HtPolynomial, out: *mut usize) -> HtStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(f, "f")?.0.dim();
        Ok(())
    })
}

/// The canonical JSON document of a polynomial.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_polynomial_to_json(f: *const HtPolynomial, out: *mut *mut c_char) -> HtStatus {
    guard(|| write_string(out, to_json(&non_null(f, "f")?.0)?))
}

/// `c_ω` as a `"num/den"` string.
///
/// # Safety
/// `omega` must point to `n` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn ht_c_constant(omega: *const u32, n: usize, out: *mut *mut c_char) -> HtStatus {
    guard(|| write_string(out, c_constant(&index(omega, n, "omega")?).to_string()))
}

/// The exact moment `∫ζ^α ζ̄^β f dσ` as JSON `{"re": "p/q", "im": "p/q"}`.
///
/// # Safety
/// `alpha` and `beta` must point to `n` readable values each.
#[no_mangle]
pub unsafe extern "C" fn ht_moment(
    f: *const HtPolynomial,
    alpha: *const u32,
    beta: *const u32,
    n: usize,
    out: *mut *mut c_char,
) -> HtStatus {
    guard(|| {
        let f = &non_null(f, "f")?.0;
        let m = moment(f, &index(alpha, n, "alpha")?, &index(beta, n, "beta")?)?;
        write_string(out, to_json(&m)?)
    })
}

/// Membership certificate as JSON; non-members are swept from `order` upward.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_check(f: *const HtPolynomial, order: u32, out: *mut *mut c_char) -> HtStatus {
    guard(|| write_string(out, to_json(&is_boundary_trace(&non_null(f, "f")?.0, order)?)?))
}

/// Every violated condition with `|α|, |β| ≤ order`, as a JSON array.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_sweep(f: *const HtPolynomial, order: u32, out: *mut *mut c_char) -> HtStatus {
    guard(|| write_string(out, to_json(&sweep(&non_null(f, "f")?.0, order)?)?))
}

/// `{"residual_sq": "p/q", "projection": {...}}`.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_szego_residual(f: *const HtPolynomial, out: *mut *mut c_char) -> HtStatus {
    guard(|| {
        let (res, g) = szego_residual(&non_null(f, "f")?.0);
        write_string(out, to_json(&serde_json::json!({ "residual_sq": res, "projection": g }))?)
    })
}

/// Monte-Carlo `∫ζ^α ζ̄^β f dσ` from `samples` draws of the stream `seed`.
///
/// # Safety
/// `alpha` and `beta` must point to `n` readable values each; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_mc_moment(
    f: *const HtPolynomial,
    alpha: *const u32,
    beta: *const u32,
    n: usize,
    seed: u64,
    samples: u64,
    out: *mut HtEstimate,
) -> HtStatus {
    guard(|| {
        let f = &non_null(f, "f")?.0;
        let slot = out_ptr(out, "out")?;
        let mut sampler = SphereSampler::new(f.dim(), seed)?;
        let g = |z: &SpherePoint| f.eval(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let est = mc_moment(g, &index(alpha, n, "alpha")?, &index(beta, n, "beta")?, &mut sampler, samples)?;
        *slot = HtEstimate { re: est.value.re, im: est.value.im, stderr: est.stderr, samples: est.samples, seed };
        Ok(())
    })
}

/// `C(z,w) = (1 − ⟨z,w⟩)^{−n}`.
///
/// # Safety
/// `z` and `w` must point to `2n` readable doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ht_cauchy_kernel(
    z: *const f64,
    w: *const f64,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HtStatus {
    guard(|| {
        let v = cauchy_kernel(&point(z, n, "z")?, &point(w, n, "w")?)?;
        *out_ptr(out_re, "out_re")? = v.re;
        *out_ptr(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// `P(z,ζ)` for `z` in the ball and `ζ` on the sphere.
///
/// # Safety
/// `z` and `zeta` must point to `2n` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_poisson_kernel(z: *const f64, zeta: *const f64, n: usize, out: *mut f64) -> HtStatus {
    guard(|| {
        let zeta = SpherePoint::new(point(zeta, n, "zeta")?)?;
        *out_ptr(out, "out")? = poisson_kernel(&point(z, n, "z")?, &zeta)?;
        Ok(())
    })
}

/// Radial scan CSV (`r,p,lp_error,lp_error_stderr,lp_norm_r,samples,seed`).
///
/// # Safety
/// `radii` must point to `n_radii` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ht_radial_scan(
    f: *const HtPolynomial,
    p: f64,
    radii: *const f64,
    n_radii: usize,
    samples: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> HtStatus {
    guard(|| {
        let f = &non_null(f, "f")?.0;
        let radii = slice(radii, n_radii, "radii")?;
        let mut sampler = SphereSampler::new(f.dim(), seed)?;
        let rows = radial_scan(f, p, radii, &mut sampler, samples)?;
        write_string(out, radial_scan_csv(&rows))
    })
}
