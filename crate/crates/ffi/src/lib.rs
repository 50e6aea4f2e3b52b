//! C ABI over `qdc-core`.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free`. Every fallible call returns a [`QdcStatus`]; on
//! failure [`qdc_last_error`] describes what went wrong on the calling thread.
//! Strings handed out by the library must be released with
//! [`qdc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use qdc_core::battery::{aggregate, report, run_suite, RunOptions, Status, Suite};
use qdc_core::expr::ExprParser;
use qdc_core::ncalg::Polynomial;
use qdc_core::presentations::{presentation, Presentation, PresentationName};
use qdc_core::rmatrix::Convention;
use qdc_core::QdcError;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    IndexOutOfRange = 4,
    InvalidArgument = 5,
    Unavailable = 6,
    BudgetExceeded = 7,
    MixedN = 8,
    Internal = 9,
    Panic = 10,
}

/// Aggregate verdict of a suite; values match the `qdc check` exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdcVerdict {
    Pass = 0,
    Fail = 1,
    Skip = 3,
}

pub struct QdcPresentation {
    inner: Presentation,
}

pub struct QdcPolynomial {
    inner: Polynomial,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &QdcError) -> QdcStatus {
    match e {
        QdcError::Parse { .. } => QdcStatus::Parse,
        QdcError::IndexOutOfRange { .. } => QdcStatus::IndexOutOfRange,
        QdcError::Unavailable(..) => QdcStatus::Unavailable,
        QdcError::BudgetExceeded => QdcStatus::BudgetExceeded,
        QdcError::MixedN(..) => QdcStatus::MixedN,
        QdcError::InvalidDimension(_) | QdcError::Unknown(_) => QdcStatus::InvalidArgument,
        _ => QdcStatus::Internal,
    }
}

struct Fail(QdcStatus);

impl From<QdcError> for Fail {
    fn from(e: QdcError) -> Self {
        set_error(&e.to_string());
        Fail(status_of(&e))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QdcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QdcStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("internal panic");
            QdcStatus::Panic
        }
    }
}

fn null() -> Fail {
    set_error("null pointer argument");
    Fail(QdcStatus::NullPointer)
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        Fail(QdcStatus::InvalidUtf8)
    })
}

/// Null selects the standard convention.
unsafe fn convention(p: *const c_char) -> Result<Convention, Fail> {
    if p.is_null() {
        return Ok(Convention::Standard);
    }
    Ok(text(p)?.parse::<Convention>()?)
}

fn hand_out(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qdc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build presentation `name` (`frt_T`, `swz`, `lbasis`, `fp`) at dimension `n`.
///
/// # Safety
/// `name` must be a valid C string, `convention` null or a valid C string,
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_presentation_new(
    name: *const c_char,
    n: usize,
    convention: *const c_char,
    out: *mut *mut QdcPresentation,
) -> QdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let name: PresentationName = text(name)?.parse()?;
        let conv = self::convention(convention)?;
        let inner = presentation(name, n, conv)?;
        *out = Box::into_raw(Box::new(QdcPresentation { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` is null or a handle from [`qdc_presentation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qdc_presentation_free(p: *mut QdcPresentation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of oriented rules; 0 for a null handle.
///
/// # Safety
/// `p` is null or a live presentation handle.
#[no_mangle]
pub unsafe extern "C" fn qdc_presentation_rule_count(p: *const QdcPresentation) -> usize {
    p.as_ref().map_or(0, |p| p.inner.rules.len())
}

/// Parse an expression over `n × n` generators.
///
/// # Safety
/// `expr` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_polynomial_parse(
    n: usize,
    expr: *const c_char,
    out: *mut *mut QdcPolynomial,
) -> QdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let src = text(expr)?;
        let inner = ExprParser::new(n, Convention::Standard)?.parse(src)?;
        *out = Box::into_raw(Box::new(QdcPolynomial { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` is null or a polynomial handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qdc_polynomial_free(p: *mut QdcPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` is null or a live polynomial handle. Null counts as zero.
#[no_mangle]
pub unsafe extern "C" fn qdc_polynomial_is_zero(p: *const QdcPolynomial) -> bool {
    p.as_ref().is_none_or(|p| p.inner.is_zero())
}

/// Canonical text form; release with [`qdc_string_free`].
///
/// # Safety
/// `p` is a live polynomial handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_polynomial_to_string(p: *const QdcPolynomial, out: *mut *mut c_char) -> QdcStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = hand_out(p.inner.to_expr_string());
        Ok(())
    })
}

/// Normal form of `poly` in `pres`, as a new polynomial handle.
///
/// # Safety
/// Both handles live, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_reduce(
    pres: *const QdcPresentation,
    poly: *const QdcPolynomial,
    out: *mut *mut QdcPolynomial,
) -> QdcStatus {
    guard(|| {
        let pres = pres.as_ref().ok_or_else(null)?;
        let poly = poly.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let inner = pres.inner.reduce(&poly.inner)?;
        *out = Box::into_raw(Box::new(QdcPolynomial { inner }));
        Ok(())
    })
}

/// Parse `expr` and return its normal form as a string.
///
/// # Safety
/// `pres` live, `expr` a valid C string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_reduce_str(
    pres: *const QdcPresentation,
    expr: *const c_char,
    out: *mut *mut c_char,
) -> QdcStatus {
    guard(|| {
        let pres = pres.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let ctx = &pres.inner.ctx;
        let p = ExprParser::new(ctx.n, ctx.convention)?.parse(text(expr)?)?;
        *out = hand_out(pres.inner.reduce(&p)?.to_expr_string());
        Ok(())
    })
}

/// Run a check suite (`all`, `matrix`, `swz`, `lbasis`, `fp-embed`).
/// `budget_ms == 0` means unlimited. If `report_json` is non-null it receives
/// the JSON report, to be released with [`qdc_string_free`].
///
/// # Safety
/// `suite` a valid C string, `verdict` a valid pointer, `report_json` null
/// or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdc_check_suite(
    suite: *const c_char,
    n: usize,
    budget_ms: u64,
    verdict: *mut QdcVerdict,
    report_json: *mut *mut c_char,
) -> QdcStatus {
    guard(|| {
        if verdict.is_null() {
            return Err(null());
        }
        let suite: Suite = text(suite)?.parse()?;
        if n == 0 {
            return Err(QdcError::InvalidDimension(0).into());
        }
        let opts =
            RunOptions { budget: (budget_ms > 0).then(|| Duration::from_millis(budget_ms)), ..Default::default() };
        let results = run_suite(suite, n, &opts);
        *verdict = match aggregate(&results) {
            Status::Pass => QdcVerdict::Pass,
            Status::Fail => QdcVerdict::Fail,
            Status::Skip => QdcVerdict::Skip,
        };
        if !report_json.is_null() {
            let json = serde_json::to_string(&report(suite, n, &opts, &results))
                .map_err(|e| QdcError::Consistency(e.to_string()))?;
            *report_json = hand_out(json);
        }
        Ok(())
    })
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
