//! C ABI for `minkorth`.
//!
//! Every call returns an [`MkStatus`]; results go through out-pointers.
//! On failure `mk_last_error()` holds a message for the calling thread.
//! Vectors are `const double *` with an explicit length, matrices are
//! row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use minkorth::approximation::{best_approximation, Subspace};
use minkorth::orthogonality::{
    birkhoff_test, isosceles_alpha_interval, left_alpha_interval, right_alpha_interval, AlphaInterval,
};
use minkorth::{Error, Gauge};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    InvalidGauge = 3,
    Domain = 4,
    Numerical = 5,
    Parse = 6,
    Panic = 7,
}

/// Opaque gauge handle. Free with `mk_gauge_free`.
pub struct MkGauge(Gauge);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MkStatus {
    match e {
        Error::DimensionMismatch { .. } => MkStatus::DimensionMismatch,
        Error::InvalidGauge(_) => MkStatus::InvalidGauge,
        Error::InvalidProgram(_) | Error::Domain(_) => MkStatus::Domain,
        Error::Numerical(_) => MkStatus::Numerical,
        Error::Parse(_) => MkStatus::Parse,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type FfiResult = Result<(), Fail>;

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> FfiResult) -> MkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MkStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MkStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MkStatus::Panic
        }
    }
}

unsafe fn gauge<'a>(g: *const MkGauge) -> Result<&'a Gauge, Fail> {
    g.as_ref().map(|g| &g.0).ok_or(Fail::Null("gauge"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn rows(p: *const f64, m: usize, d: usize, what: &'static str) -> Result<Vec<Vec<f64>>, Fail> {
    let flat = slice(p, m * d, what)?;
    Ok(flat.chunks(d.max(1)).map(<[f64]>::to_vec).collect())
}

unsafe fn write<T>(out: *mut T, v: T, what: &'static str) -> FfiResult {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_interval(i: AlphaInterval, lo: *mut f64, hi: *mut f64) -> FfiResult {
    if lo.is_null() || hi.is_null() {
        return Err(Fail::Null("interval output"));
    }
    lo.write(i.lo);
    hi.write(i.hi);
    Ok(())
}

unsafe fn new_gauge(out: *mut *mut MkGauge, g: Gauge) -> FfiResult {
    write(out, Box::into_raw(Box::new(MkGauge(g))), "out")
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn mk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Gauge from its JSON description (NUL-terminated UTF-8).
///
/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_from_json(json: *const c_char, out: *mut *mut MkGauge) -> MkStatus {
    guard(|| {
        if json.is_null() {
            return Err(Fail::Null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Error::Parse(format!("gauge text is not UTF-8: {e}")))?;
        new_gauge(out, Gauge::from_json(text)?)
    })
}

/// `m` normals of dimension `d`, row-major.
///
/// # Safety
/// `normals` must hold `m * d` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_polytope_h(
    normals: *const f64,
    m: usize,
    d: usize,
    out: *mut *mut MkGauge,
) -> MkStatus {
    guard(|| new_gauge(out, Gauge::polytope_h(rows(normals, m, d, "normals")?)?))
}

/// `m` vertices of dimension `d`, row-major.
///
/// # Safety
/// `vertices` must hold `m * d` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_polytope_v(
    vertices: *const f64,
    m: usize,
    d: usize,
    out: *mut *mut MkGauge,
) -> MkStatus {
    guard(|| new_gauge(out, Gauge::polytope_v(rows(vertices, m, d, "vertices")?)?))
}

/// Unit ball `(x - c)^T Q (x - c) <= 1`; `q` is `d * d` row-major.
///
/// # Safety
/// `q` must hold `d * d` doubles and `c` `d` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_ellipsoid(
    q: *const f64,
    c: *const f64,
    d: usize,
    out: *mut *mut MkGauge,
) -> MkStatus {
    guard(|| new_gauge(out, Gauge::ellipsoid(rows(q, d, d, "q")?, slice(c, d, "c")?.to_vec())?))
}

/// Frees a handle. NULL is ignored.
///
/// # Safety
/// `g` must come from one of the constructors and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_free(g: *mut MkGauge) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Ambient dimension, 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_dim(g: *const MkGauge) -> usize {
    g.as_ref().map_or(0, |g| g.0.dim())
}

/// # Safety
/// `x` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_eval(g: *const MkGauge, x: *const f64, len: usize, out: *mut f64) -> MkStatus {
    guard(|| write(out, gauge(g)?.eval(slice(x, len, "x")?)?, "out"))
}

/// # Safety
/// `xs` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_gauge_polar(g: *const MkGauge, xs: *const f64, len: usize, out: *mut f64) -> MkStatus {
    guard(|| write(out, gauge(g)?.polar_eval(slice(xs, len, "xs")?)?, "out"))
}

/// `gamma'_eps(x; y)`.
///
/// # Safety
/// `x` and `y` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_directional_derivative(
    g: *const MkGauge,
    x: *const f64,
    y: *const f64,
    len: usize,
    eps: f64,
    out: *mut f64,
) -> MkStatus {
    guard(|| {
        let v = gauge(g)?.directional_derivative(slice(x, len, "x")?, slice(y, len, "y")?, eps)?;
        write(out, v, "out")
    })
}

/// Whether `x` is eps-Birkhoff orthogonal to `y`.
///
/// # Safety
/// `x` and `y` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_birkhoff_test(
    g: *const MkGauge,
    x: *const f64,
    y: *const f64,
    len: usize,
    eps: f64,
    out: *mut bool,
) -> MkStatus {
    guard(|| {
        let v = birkhoff_test(gauge(g)?, slice(x, len, "x")?, slice(y, len, "y")?, eps)?;
        write(out, v, "out")
    })
}

/// `{alpha : x is eps-orthogonal to alpha x + y}`.
///
/// # Safety
/// `x` and `y` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_right_interval(
    g: *const MkGauge,
    x: *const f64,
    y: *const f64,
    len: usize,
    eps: f64,
    lo: *mut f64,
    hi: *mut f64,
) -> MkStatus {
    guard(|| write_interval(right_alpha_interval(gauge(g)?, slice(x, len, "x")?, slice(y, len, "y")?, eps)?, lo, hi))
}

/// `{alpha : alpha x + y is eps-orthogonal to x}`.
///
/// # Safety
/// `x` and `y` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_left_interval(
    g: *const MkGauge,
    x: *const f64,
    y: *const f64,
    len: usize,
    eps: f64,
    lo: *mut f64,
    hi: *mut f64,
) -> MkStatus {
    guard(|| write_interval(left_alpha_interval(gauge(g)?, slice(x, len, "x")?, slice(y, len, "y")?, eps)?, lo, hi))
}

/// `{alpha : alpha x + y is isosceles orthogonal to x}`.
///
/// # Safety
/// `x` and `y` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mk_isosceles_interval(
    g: *const MkGauge,
    x: *const f64,
    y: *const f64,
    len: usize,
    lo: *mut f64,
    hi: *mut f64,
) -> MkStatus {
    guard(|| write_interval(isosceles_alpha_interval(gauge(g)?, slice(x, len, "x")?, slice(y, len, "y")?)?, lo, hi))
}

/// Best approximation of `y` from `span(basis)`; `basis` is `k * len`
/// row-major. Writes the minimizer to `point` (`len` doubles), the
/// distance to `value` and, if non-NULL, a certificate to `certificate`.
///
/// # Safety
/// Buffers must have the sizes above.
#[no_mangle]
pub unsafe extern "C" fn mk_best_approximation(
    g: *const MkGauge,
    basis: *const f64,
    k: usize,
    y: *const f64,
    len: usize,
    point: *mut f64,
    value: *mut f64,
    certificate: *mut f64,
) -> MkStatus {
    guard(|| {
        let g = gauge(g)?;
        let u = Subspace::new(rows(basis, k, len, "basis")?, len)?;
        let r = best_approximation(g, &u, slice(y, len, "y")?, 0.0)?;
        if point.is_null() {
            return Err(Fail::Null("point"));
        }
        ptr::copy_nonoverlapping(r.point.as_ptr(), point, len);
        if !certificate.is_null() {
            ptr::copy_nonoverlapping(r.certificate.as_ptr(), certificate, len);
        }
        write(value, r.value, "value")
    })
}
