//! C ABI for the microsq toolkit.
//!
//! Every function returns a [`MicrosqStatus`] and writes results through
//! out-pointers. Panics are caught at the boundary and reported as
//! `MICROSQ_STATUS_PANIC`. The message of the most recent failure on the
//! calling thread is available from [`microsq_last_error`].
//!
//! Sphere point sets and local-factor tables are returned as opaque
//! handles that must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use microsq::arith::{classify, factorize, legendre};
use microsq::density::{a_term, singular_series_additive, singular_series_multiplicative, LocalFactorTable};
use microsq::expsum::gauss_sum;
use microsq::reps::{count_reps, min_microsquare};
use microsq::sphere::{lattice_points, min_spacing, Metric, SpherePointSet};
use microsq::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MicrosqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    NotFound = 4,
    BufferTooSmall = 5,
    ConvergenceFailure = 6,
    InvariantViolation = 7,
    InternalError = 8,
    Panic = 9,
}

/// Distance convention for [`microsq_sphere_min_spacing`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MicrosqMetric {
    Euclidean = 0,
    SquaredEuclidean = 1,
}

/// Integer points on a sphere.
pub struct MicrosqSpherePoints {
    inner: SpherePointSet,
}

/// Local factors of the multiplicative singular series.
pub struct MicrosqLocalTable {
    inner: LocalFactorTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn from_error(e: Error) -> MicrosqStatus {
    let status = match &e {
        Error::InvalidArgument(_) | Error::Config(_) => MicrosqStatus::InvalidArgument,
        Error::OutOfRange(_) => MicrosqStatus::OutOfRange,
        Error::Convergence(_) => MicrosqStatus::ConvergenceFailure,
        Error::InvariantViolation(_) => MicrosqStatus::InvariantViolation,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => MicrosqStatus::InternalError,
    };
    set_last_error(e.to_string());
    status
}

fn fail(status: MicrosqStatus, msg: &str) -> MicrosqStatus {
    set_last_error(msg.to_string());
    status
}

fn guard(f: impl FnOnce() -> MicrosqStatus) -> MicrosqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(MicrosqStatus::Panic, &msg)
        }
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return from_error(err),
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(MicrosqStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn microsq_status_message(status: MicrosqStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        MicrosqStatus::Ok => b"ok\0",
        MicrosqStatus::NullPointer => b"null pointer\0",
        MicrosqStatus::InvalidArgument => b"invalid argument\0",
        MicrosqStatus::OutOfRange => b"argument out of supported range\0",
        MicrosqStatus::NotFound => b"no such value\0",
        MicrosqStatus::BufferTooSmall => b"buffer too small\0",
        MicrosqStatus::ConvergenceFailure => b"quadrature did not converge\0",
        MicrosqStatus::InvariantViolation => b"internal check failed\0",
        MicrosqStatus::InternalError => b"internal error\0",
        MicrosqStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full message length without the NUL,
/// or 0 when there is no message.
///
/// # Safety
/// `buf` must be null or valid for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn microsq_last_error(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let k = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), k);
            *buf.add(k) = 0;
        }
        bytes.len()
    })
}

/// Prime factorization of `n` into parallel arrays. On
/// `MICROSQ_STATUS_BUFFER_TOO_SMALL`, `*out_len` holds the required length.
///
/// # Safety
/// `primes` and `exponents` must be valid for `capacity` elements (they may
/// be null when `capacity` is 0); `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn microsq_factorize(
    n: u64,
    primes: *mut u64,
    exponents: *mut u32,
    capacity: usize,
    out_len: *mut usize,
) -> MicrosqStatus {
    guard(|| {
        non_null!(out_len);
        let f = try_ffi!(factorize(n));
        *out_len = f.len();
        if f.len() > capacity {
            return fail(MicrosqStatus::BufferTooSmall, "factor buffer too small");
        }
        if !f.is_empty() {
            non_null!(primes, exponents);
        }
        for (i, &(p, e)) in f.iter().enumerate() {
            *primes.add(i) = p;
            *exponents.add(i) = e;
        }
        MicrosqStatus::Ok
    })
}

/// Legendre symbol `(b / p)` for an odd prime `p`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_legendre(b: i64, p: u64, out: *mut i8) -> MicrosqStatus {
    guard(|| {
        non_null!(out);
        *out = try_ffi!(legendre(b, p));
        MicrosqStatus::Ok
    })
}

/// Eligibility tags of `n` as a bitmask (bit `k` for class `k`).
///
/// # Safety
/// `out_bits` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_classify(n: u64, out_bits: *mut u8) -> MicrosqStatus {
    guard(|| {
        non_null!(out_bits);
        *out_bits = classify(n).bits();
        MicrosqStatus::Ok
    })
}

/// Quadratic Gauss sum `S(q, a)` for `gcd(a, q) = 1`.
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_gauss_sum(q: u64, a: i64, out_re: *mut f64, out_im: *mut f64) -> MicrosqStatus {
    guard(|| {
        non_null!(out_re, out_im);
        let z = try_ffi!(gauss_sum(q, a));
        *out_re = z.re;
        *out_im = z.im;
        MicrosqStatus::Ok
    })
}

/// Local density `A(q; n)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_a_term(q: u64, n: u64, out: *mut f64) -> MicrosqStatus {
    guard(|| {
        non_null!(out);
        *out = try_ffi!(a_term(q, n));
        MicrosqStatus::Ok
    })
}

/// Truncated singular series: multiplicative when `multiplicative` is
/// true, additive otherwise.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_singular_series(n: u64, w: f64, multiplicative: bool, out: *mut f64) -> MicrosqStatus {
    guard(|| {
        non_null!(out);
        *out = if multiplicative {
            try_ffi!(singular_series_multiplicative(n, w)).value
        } else {
            try_ffi!(singular_series_additive(n, w))
        };
        MicrosqStatus::Ok
    })
}

/// Number of representations `n = x1^2 + x2^2 + x3^2` with `x3 <= y`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_count_reps(
    n: u64,
    y: u64,
    ordered: bool,
    allow_zero: bool,
    out: *mut u64,
) -> MicrosqStatus {
    guard(|| {
        non_null!(out);
        *out = try_ffi!(count_reps(n, y, ordered, allow_zero));
        MicrosqStatus::Ok
    })
}

/// Least microsquare of `n`; `MICROSQ_STATUS_NOT_FOUND` when none exists.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_min_microsquare(n: u64, out: *mut u64) -> MicrosqStatus {
    guard(|| {
        non_null!(out);
        match min_microsquare(n) {
            Some(y) => {
                *out = y;
                MicrosqStatus::Ok
            }
            None => fail(MicrosqStatus::NotFound, "no representation with positive coordinates"),
        }
    })
}

/// Enumerates the integer points on the sphere of radius `sqrt(n)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_sphere_new(n: u64, out: *mut *mut MicrosqSpherePoints) -> MicrosqStatus {
    guard(|| {
        non_null!(out);
        let inner = try_ffi!(lattice_points(n));
        *out = Box::into_raw(Box::new(MicrosqSpherePoints { inner }));
        MicrosqStatus::Ok
    })
}

/// # Safety
/// `handle` must come from [`microsq_sphere_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn microsq_sphere_len(handle: *const MicrosqSpherePoints, out: *mut usize) -> MicrosqStatus {
    guard(|| {
        non_null!(handle, out);
        *out = (*handle).inner.count;
        MicrosqStatus::Ok
    })
}

/// Writes point `index` (in lexicographic order) to `out_xyz[0..3]`.
///
/// # Safety
/// `handle` must come from [`microsq_sphere_new`]; `out_xyz` must be valid
/// for three writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_sphere_get(
    handle: *const MicrosqSpherePoints,
    index: usize,
    out_xyz: *mut i64,
) -> MicrosqStatus {
    guard(|| {
        non_null!(handle, out_xyz);
        let set = &(*handle).inner;
        let Some(p) = set.points.get(index) else {
            return fail(MicrosqStatus::OutOfRange, "point index out of range");
        };
        ptr::copy_nonoverlapping(p.as_ptr(), out_xyz, 3);
        MicrosqStatus::Ok
    })
}

/// Minimum spacing of the normalized points; `MICROSQ_STATUS_NOT_FOUND`
/// with fewer than two points.
///
/// # Safety
/// `handle` must come from [`microsq_sphere_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn microsq_sphere_min_spacing(
    handle: *const MicrosqSpherePoints,
    metric: MicrosqMetric,
    out: *mut f64,
) -> MicrosqStatus {
    guard(|| {
        non_null!(handle, out);
        let metric = match metric {
            MicrosqMetric::Euclidean => Metric::Euclidean,
            MicrosqMetric::SquaredEuclidean => Metric::SquaredEuclidean,
        };
        match min_spacing(&(*handle).inner, metric) {
            Some(m) => {
                *out = m;
                MicrosqStatus::Ok
            }
            None => fail(MicrosqStatus::NotFound, "fewer than two points"),
        }
    })
}

/// # Safety
/// `handle` must be null or come from [`microsq_sphere_new`], and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn microsq_sphere_free(handle: *mut MicrosqSpherePoints) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Local factors `sum_{h <= H(p)} A(p^h; n)` for the primes `p <= w`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn microsq_local_table_new(n: u64, w: f64, out: *mut *mut MicrosqLocalTable) -> MicrosqStatus {
    guard(|| {
        non_null!(out);
        let inner = try_ffi!(singular_series_multiplicative(n, w));
        *out = Box::into_raw(Box::new(MicrosqLocalTable { inner }));
        MicrosqStatus::Ok
    })
}

/// # Safety
/// `handle` must come from [`microsq_local_table_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn microsq_local_table_len(handle: *const MicrosqLocalTable, out: *mut usize) -> MicrosqStatus {
    guard(|| {
        non_null!(handle, out);
        *out = (*handle).inner.rows.len();
        MicrosqStatus::Ok
    })
}

/// Row `index`: the prime, its exponent bound `H(p)` and the partial sum.
///
/// # Safety
/// `handle` must come from [`microsq_local_table_new`]; the out-pointers
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn microsq_local_table_row(
    handle: *const MicrosqLocalTable,
    index: usize,
    out_p: *mut u64,
    out_h: *mut u32,
    out_partial_sum: *mut f64,
) -> MicrosqStatus {
    guard(|| {
        non_null!(handle, out_p, out_h, out_partial_sum);
        let table = &(*handle).inner;
        let Some(row) = table.rows.get(index) else {
            return fail(MicrosqStatus::OutOfRange, "row index out of range");
        };
        *out_p = row.p;
        *out_h = row.h;
        *out_partial_sum = row.partial_sum;
        MicrosqStatus::Ok
    })
}

/// Product of all local factors.
///
/// # Safety
/// `handle` must come from [`microsq_local_table_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn microsq_local_table_value(handle: *const MicrosqLocalTable, out: *mut f64) -> MicrosqStatus {
    guard(|| {
        non_null!(handle, out);
        *out = (*handle).inner.value;
        MicrosqStatus::Ok
    })
}

/// # Safety
/// `handle` must be null or come from [`microsq_local_table_new`], and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn microsq_local_table_free(handle: *mut MicrosqLocalTable) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
