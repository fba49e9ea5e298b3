//! C ABI for `infwedge`.
//!
//! Every fallible function returns an [`IwStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`iw_last_error_message`]. Half-integers are passed as odd
//! doubled `int64_t` values, as on the command line.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use infwedge::schur_measure::{correlation, plancherel_params, SchurParams};
use infwedge::uniform::expected::lambert_value;
use infwedge::uniform::frobenius::{frobenius_corr_enum, frobenius_corr_integral};
use infwedge::uniform::limit::bulk_limit;
use infwedge::uniform::npoint::{npoint_direct, npoint_theta_with, NPointRequest};
use infwedge::uniform::sampler::{SampleStream, UniformSampler};
use infwedge::uniform::theta::{theta3, theta_deriv, ThetaContext};
use infwedge::{Error, HalfInt, Partition, TruncSeries};

/// Status codes. 2, 3 and 4 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IwStatus {
    Ok = 0,
    Parse = 2,
    Domain = 3,
    Numeric = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque sampler handle.
pub struct IwSampler {
    stream: SampleStream,
    /// A drawn sample that did not fit the caller's buffer.
    pending: Option<Partition>,
}

/// Opaque exact series handle.
pub struct IwSeries {
    series: TruncSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> IwStatus {
    let status = match e {
        Error::Parse(_) => IwStatus::Parse,
        Error::Domain(_) => IwStatus::Domain,
        Error::Numeric(_) => IwStatus::Numeric,
    };
    set_error(e.to_string());
    status
}

fn null(what: &str) -> IwStatus {
    set_error(format!("{what} is NULL"));
    IwStatus::NullPointer
}

/// Runs `f`, turning a panic into [`IwStatus::Panic`].
fn guard(f: impl FnOnce() -> IwStatus) -> IwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            IwStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be NULL only when `len` is 0, otherwise point to `len` values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn halfints(ptr: *const i64, len: usize) -> Result<Vec<HalfInt>, IwStatus> {
    let raw = slice(ptr, len).ok_or_else(|| null("x_twice"))?;
    let mut xs = raw.iter().map(|&x| HalfInt::from_twice(x)).collect::<Result<Vec<_>, _>>().map_err(fail)?;
    xs.sort();
    xs.dedup();
    Ok(xs)
}

fn write<T>(out: *mut T, value: T) -> IwStatus {
    if out.is_null() {
        return null("out");
    }
    unsafe { out.write(value) };
    IwStatus::Ok
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn iw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `(x d/dx)^k Θ₁₁(x; q)`.
#[no_mangle]
pub extern "C" fn iw_theta11(x: f64, q: f64, k: u32, out: *mut f64) -> IwStatus {
    guard(|| match ThetaContext::new(q).and_then(|c| theta_deriv(k, x, &c)) {
        Ok(v) => write(out, v),
        Err(e) => fail(e),
    })
}

/// `Θ₃(z; q)`.
#[no_mangle]
pub extern "C" fn iw_theta3(z: f64, q: f64, out: *mut f64) -> IwStatus {
    guard(|| match ThetaContext::new(q).and_then(|c| theta3(z, &c)) {
        Ok(v) => write(out, v),
        Err(e) => fail(e),
    })
}

/// n-point function by the theta-determinant formula.
///
/// # Safety
/// `ts` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn iw_npoint_theta(ts: *const f64, n: usize, q: f64, out: *mut f64) -> IwStatus {
    guard(|| {
        let Some(ts) = slice(ts, n) else { return null("ts") };
        match ThetaContext::new(q).and_then(|c| npoint_theta_with(ts, &c)) {
            Ok(v) => write(out, v),
            Err(e) => fail(e),
        }
    })
}

/// n-point function by summation over partitions. `error_out` may be NULL.
///
/// # Safety
/// `ts` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn iw_npoint_direct(
    ts: *const f64,
    n: usize,
    q: f64,
    cutoff: usize,
    out: *mut f64,
    error_out: *mut f64,
) -> IwStatus {
    guard(|| {
        let Some(ts) = slice(ts, n) else { return null("ts") };
        match npoint_direct(&NPointRequest::new(ts.to_vec(), q), cutoff) {
            Ok(v) => {
                if !error_out.is_null() {
                    error_out.write(v.error_estimate);
                }
                write(out, v.value)
            }
            Err(e) => fail(e),
        }
    })
}

/// Frobenius correlation `ϱ(X, q)` by the contour integral; `q` in (0, 1).
///
/// # Safety
/// `x_twice` must point to `n` values.
#[no_mangle]
pub unsafe extern "C" fn iw_frobenius_corr(x_twice: *const i64, n: usize, q: f64, out: *mut f64) -> IwStatus {
    guard(|| {
        let xs = match halfints(x_twice, n) {
            Ok(xs) => xs,
            Err(s) => return s,
        };
        if q <= 0.0 {
            return fail(Error::Domain(format!("the contour integral needs q > 0, got {q}")));
        }
        match ThetaContext::new(q) {
            Ok(c) => write(out, frobenius_corr_integral(&xs, &c)),
            Err(e) => fail(e),
        }
    })
}

/// Frobenius correlation by enumeration over `|λ| ≤ cutoff` (at most 80).
///
/// # Safety
/// `x_twice` must point to `n` values.
#[no_mangle]
pub unsafe extern "C" fn iw_frobenius_corr_enum(
    x_twice: *const i64,
    n: usize,
    q: f64,
    cutoff: usize,
    out: *mut f64,
) -> IwStatus {
    guard(|| {
        let xs = match halfints(x_twice, n) {
            Ok(xs) => xs,
            Err(s) => return s,
        };
        if cutoff > infwedge::partitions::DEFAULT_ENUMERATION_LIMIT {
            return fail(Error::Domain(format!("cutoff {cutoff} is above the enumeration limit")));
        }
        match ThetaContext::new(q) {
            Ok(c) => write(out, frobenius_corr_enum(&xs, &c, cutoff)),
            Err(e) => fail(e),
        }
    })
}

/// Expected size `N(q)`.
#[no_mangle]
pub extern "C" fn iw_expected_size(q: f64, out: *mut f64) -> IwStatus {
    guard(|| match ThetaContext::new(q) {
        Ok(c) => write(out, lambert_value(&c)),
        Err(e) => fail(e),
    })
}

/// `Π (1 + exp(π|ξ_i|/√6))^{-1}`.
///
/// # Safety
/// `xis` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn iw_bulk_limit(xis: *const f64, n: usize, out: *mut f64) -> IwStatus {
    guard(|| match slice(xis, n) {
        Some(xis) => write(out, bulk_limit(xis)),
        None => null("xis"),
    })
}

/// New sampler for the uniform measure at `q`; `tail_eps <= 0` selects the
/// default part cutoff.
///
/// # Safety
/// `out` must be a valid pointer; free the handle with [`iw_sampler_free`].
#[no_mangle]
pub unsafe extern "C" fn iw_sampler_new(q: f64, tail_eps: f64, seed: u64, out: *mut *mut IwSampler) -> IwStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let eps = if tail_eps > 0.0 { tail_eps } else { infwedge::uniform::sampler::DEFAULT_TAIL_EPS };
        match UniformSampler::new(q, eps) {
            Ok(s) => {
                let handle = Box::new(IwSampler { stream: SampleStream::new(s, seed), pending: None });
                out.write(Box::into_raw(handle));
                IwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Draws the next partition into `parts[0..*len_out]`, largest part first.
/// If `capacity` is too small, returns `BufferTooSmall` with the needed
/// length in `*len_out` and keeps the sample for the next call.
///
/// # Safety
/// `sampler` must come from [`iw_sampler_new`]; `parts` must hold `capacity`
/// values.
#[no_mangle]
pub unsafe extern "C" fn iw_sampler_next(
    sampler: *mut IwSampler,
    parts: *mut u64,
    capacity: usize,
    len_out: *mut usize,
) -> IwStatus {
    guard(|| {
        let Some(s) = sampler.as_mut() else { return null("sampler") };
        if len_out.is_null() {
            return null("len_out");
        }
        let lambda = match s.pending.take() {
            Some(p) => p,
            None => s.stream.next().expect("the stream is infinite"),
        };
        len_out.write(lambda.len());
        if lambda.len() > capacity {
            set_error(format!("partition has {} parts, buffer holds {capacity}", lambda.len()));
            s.pending = Some(lambda);
            return IwStatus::BufferTooSmall;
        }
        if !lambda.is_empty() {
            if parts.is_null() {
                s.pending = Some(lambda);
                return null("parts");
            }
            for (i, &p) in lambda.parts().iter().enumerate() {
                parts.add(i).write(p as u64);
            }
        }
        IwStatus::Ok
    })
}

/// # Safety
/// `sampler` must come from [`iw_sampler_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iw_sampler_free(sampler: *mut IwSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

unsafe fn series_out(params: SchurParams, x_twice: *const i64, n: usize, out: *mut *mut IwSeries) -> IwStatus {
    if out.is_null() {
        return null("out");
    }
    let xs = match halfints(x_twice, n) {
        Ok(xs) => xs,
        Err(s) => return s,
    };
    let series = correlation(&params, &xs);
    out.write(Box::into_raw(Box::new(IwSeries { series })));
    IwStatus::Ok
}

/// `ρ(X)` for formal `t_1..t_kmax`, `t'_1..t'_kmax`, truncated at `order`.
///
/// # Safety
/// `x_twice` must point to `n` values; free the result with [`iw_series_free`].
#[no_mangle]
pub unsafe extern "C" fn iw_schur_correlation_symbolic(
    kmax: u32,
    order: u32,
    x_twice: *const i64,
    n: usize,
    out: *mut *mut IwSeries,
) -> IwStatus {
    guard(|| {
        if kmax == 0 || order == 0 || kmax > order {
            return fail(Error::Domain(format!("need 1 <= kmax <= order, got kmax={kmax}, order={order}")));
        }
        series_out(SchurParams::symbolic(kmax, order), x_twice, n, out)
    })
}

/// `ρ(X)` for the Plancherel measure in `s = ξ^{1/2}`.
///
/// # Safety
/// As for [`iw_schur_correlation_symbolic`].
#[no_mangle]
pub unsafe extern "C" fn iw_schur_correlation_plancherel(
    order: u32,
    x_twice: *const i64,
    n: usize,
    out: *mut *mut IwSeries,
) -> IwStatus {
    guard(|| {
        if order == 0 {
            return fail(Error::Domain("order must be at least 1".into()));
        }
        series_out(plancherel_params(order), x_twice, n, out)
    })
}

/// Serializes a series as `{order, terms: [{exponents, num, den}]}`.
///
/// # Safety
/// `series` must be a live handle; free the string with [`iw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn iw_series_to_json(series: *const IwSeries, out: *mut *mut c_char) -> IwStatus {
    guard(|| {
        let Some(s) = series.as_ref() else { return null("series") };
        if out.is_null() {
            return null("out");
        }
        let text = match serde_json::to_string(&s.series.to_json()) {
            Ok(t) => t,
            Err(e) => return fail(Error::Numeric(e.to_string())),
        };
        let c = CString::new(text).expect("JSON has no NUL bytes");
        out.write(c.into_raw());
        IwStatus::Ok
    })
}

/// # Safety
/// `series` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iw_series_free(series: *mut IwSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// # Safety
/// `s` must come from [`iw_series_to_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
