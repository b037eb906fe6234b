//! C ABI over `stonework`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or
//! `*_new` functions and released by the matching `*_free`. Every fallible
//! function returns a [`StwStatus`]; on failure the message is available
//! from [`stw_last_error`] until the next call on the same thread. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! must be released with [`stw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::json;
use stonework::duality::{h_embed, phi};
use stonework::examples::{build_contrast, obstruction_witness, rna_certificate, ContrastMonoid};
use stonework::finmon::{FiniteMonoid, SelfMap};
use stonework::suite::{run_suite, SuiteConfig};
use stonework::ultra::{
    check_nonexpansive, d_from_chain, format_dist, MonotoneChain, Side, UltraPseudometric,
};
use stonework::{boolring::BoolRing, Error, Limits};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// The input parsed but violates a structural law.
    Domain = 4,
    ResourceLimit = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Which translations a nonexpansiveness check uses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StwSide {
    Left = 0,
    Right = 1,
}

/// A validated finite monoid.
pub struct StwMonoid(FiniteMonoid);

/// An ultra-pseudometric on `{0, .., n-1}` with rational values.
pub struct StwMetric(UltraPseudometric);

/// A truncation of the Cantor-cube contrast monoid.
pub struct StwContrast(ContrastMonoid);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> StwStatus {
    match e {
        Error::Parse(_) => StwStatus::Parse,
        Error::ResourceLimit { .. } => StwStatus::ResourceLimit,
        Error::OutOfRange { .. } => StwStatus::OutOfRange,
        _ => StwStatus::Domain,
    }
}

struct Fail(StwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        // domain validation runs inside deserialization and surfaces as a
        // data error
        let status = match e.classify() {
            serde_json::error::Category::Data => StwStatus::Domain,
            _ => StwStatus::Parse,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(StwStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> StwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            StwStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            StwStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(StwStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output string pointer"));
    }
    let c = CString::new(s).map_err(|e| Fail(StwStatus::Domain, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(|| null(what))
}

/// The message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn stw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn stw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates `{"size", "identity", "table"}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_monoid_from_json(
    json: *const c_char,
    out: *mut *mut StwMonoid,
) -> StwStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let m: FiniteMonoid = serde_json::from_str(text)?;
        write_handle(out, StwMonoid(m))
    })
}

/// Serializes a monoid back to JSON.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_monoid_to_json(
    m: *const StwMonoid,
    out: *mut *mut c_char,
) -> StwStatus {
    guard(|| {
        let m = handle(m, "monoid")?;
        write_string(out, serde_json::to_string(&m.0)?)
    })
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stw_monoid_size(m: *const StwMonoid) -> usize {
    m.as_ref().map_or(0, |m| m.0.size())
}

/// Index of the identity element.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_monoid_identity(m: *const StwMonoid, out: *mut usize) -> StwStatus {
    guard(|| {
        let m = handle(m, "monoid")?;
        *out.as_mut().ok_or_else(|| null("out"))? = m.0.identity();
        Ok(())
    })
}

/// The product `a · b`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_monoid_mul(
    m: *const StwMonoid,
    a: usize,
    b: usize,
    out: *mut usize,
) -> StwStatus {
    guard(|| {
        let m = handle(m, "monoid")?;
        let n = m.0.size();
        if let Some(&index) = [a, b].iter().find(|&&x| x >= n) {
            return Err(Error::OutOfRange { index, size: n }.into());
        }
        *out.as_mut().ok_or_else(|| null("out"))? = m.0.mul(a, b);
        Ok(())
    })
}

/// Releases a monoid. Null is ignored.
///
/// # Safety
/// `m` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn stw_monoid_free(m: *mut StwMonoid) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Parses and validates `{"dist": [["p/q", ..], ..]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_metric_from_json(
    json: *const c_char,
    out: *mut *mut StwMetric,
) -> StwStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let d: UltraPseudometric = serde_json::from_str(text)?;
        write_handle(out, StwMetric(d))
    })
}

/// Builds the metric of a monotone chain `{"carrier_size", "chain"}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_metric_from_chain_json(
    json: *const c_char,
    out: *mut *mut StwMetric,
) -> StwStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let chain: MonotoneChain = serde_json::from_str(text)?;
        write_handle(out, StwMetric(d_from_chain(&chain)))
    })
}

/// Serializes a metric back to JSON.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_metric_to_json(
    d: *const StwMetric,
    out: *mut *mut c_char,
) -> StwStatus {
    guard(|| {
        let d = handle(d, "metric")?;
        write_string(out, serde_json::to_string(&d.0)?)
    })
}

/// The distance `d(x, y)` as a reduced fraction `"p/q"` (or `"p"`).
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_metric_distance(
    d: *const StwMetric,
    x: usize,
    y: usize,
    out: *mut *mut c_char,
) -> StwStatus {
    guard(|| {
        let d = handle(d, "metric")?;
        let n = d.0.carrier_size();
        if let Some(&index) = [x, y].iter().find(|&&p| p >= n) {
            return Err(Error::OutOfRange { index, size: n }.into());
        }
        write_string(out, format_dist(&d.0.get(x, y)))
    })
}

/// Releases a metric. Null is ignored.
///
/// # Safety
/// `d` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn stw_metric_free(d: *mut StwMetric) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Checks `d` against the translations on `side`. `*nonexpansive` receives
/// the verdict; when it is false and `witness` is non-null, `*witness`
/// receives `{"side", "s", "x", "y"}` as JSON.
///
/// # Safety
/// Handles must be live; `nonexpansive` must be writable; `witness` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn stw_check_nonexpansive(
    m: *const StwMonoid,
    d: *const StwMetric,
    side: StwSide,
    nonexpansive: *mut bool,
    witness: *mut *mut c_char,
) -> StwStatus {
    guard(|| {
        let m = handle(m, "monoid")?;
        let d = handle(d, "metric")?;
        let side = match side {
            StwSide::Left => Side::Left,
            StwSide::Right => Side::Right,
        };
        let found = check_nonexpansive(&m.0, &d.0, side)?;
        *nonexpansive.as_mut().ok_or_else(|| null("nonexpansive"))? = found.is_none();
        if let (Some(w), false) = (found, witness.is_null()) {
            write_string(witness, serde_json::to_string(&w)?)?;
        }
        Ok(())
    })
}

/// Maps a self-map `[s(0), .., s(n-1)]` to
/// `{"self_map", "ring_endo", "dual_endo"}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_dualize_json(json: *const c_char, out: *mut *mut c_char) -> StwStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let s: SelfMap = serde_json::from_str(text)?;
        let ring = BoolRing::new(s.carrier_size())?;
        let value = json!({
            "self_map": s,
            "ring_endo": phi(&s, &ring)?,
            "dual_endo": h_embed(&s, &ring)?,
        });
        write_string(out, value.to_string())
    })
}

/// Builds the level-`k` contrast monoid, `1 ≤ k ≤ 16`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_contrast_new(k: usize, out: *mut *mut StwContrast) -> StwStatus {
    guard(|| write_handle(out, StwContrast(build_contrast(k)?)))
}

/// A new monoid handle holding the contrast monoid's table.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_contrast_monoid(
    c: *const StwContrast,
    out: *mut *mut StwMonoid,
) -> StwStatus {
    guard(|| {
        let c = handle(c, "contrast")?;
        write_handle(out, StwMonoid(c.0.monoid().clone()))
    })
}

/// A new metric handle holding the contrast monoid's metric.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_contrast_metric(
    c: *const StwContrast,
    out: *mut *mut StwMetric,
) -> StwStatus {
    guard(|| {
        let c = handle(c, "contrast")?;
        write_handle(out, StwMetric(c.0.metric().clone()))
    })
}

/// The certificate, table digest and obstruction witnesses as JSON.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stw_contrast_report_json(
    c: *const StwContrast,
    out: *mut *mut c_char,
) -> StwStatus {
    guard(|| {
        let c = handle(c, "contrast")?;
        let k = c.0.k();
        let witnesses: Vec<_> = (0..k)
            .filter_map(|j| obstruction_witness(&c.0, j).ok())
            .collect();
        let value = json!({
            "k": k,
            "carrier_size": c.0.carrier_size(),
            "table_sha256": c.0.table_digest(),
            "certificate": rna_certificate(&c.0)?,
            "obstruction_witnesses": witnesses,
        });
        write_string(out, value.to_string())
    })
}

/// Releases a contrast handle. Null is ignored.
///
/// # Safety
/// `c` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn stw_contrast_free(c: *mut StwContrast) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Runs the whole verification suite. `*passed` receives whether every
/// check passed; `report`, when non-null, receives the JSON report.
///
/// # Safety
/// `passed` must be writable; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn stw_verify_all(
    bound_points: usize,
    bound_atoms: usize,
    bound_k: usize,
    seed: u64,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> StwStatus {
    guard(|| {
        let cfg = SuiteConfig {
            bound_points,
            bound_atoms,
            bound_k,
            seed,
            self_test: false,
            limits: Limits::from_env()?,
        };
        let reports = run_suite(&cfg)?;
        *passed.as_mut().ok_or_else(|| null("passed"))? =
            reports.iter().all(|r| r.outcome.passed());
        if !report.is_null() {
            write_string(report, serde_json::to_string(&reports)?)?;
        }
        Ok(())
    })
}
