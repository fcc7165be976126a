//! C interface to the `ktower` engine.
//!
//! Towers and enumerators are opaque heap handles. Every fallible call
//! returns a [`KtStatus`]; on failure a description is available from
//! [`kt_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and released with [`kt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ktower::bijection::{expand, reduce, ReductionLabel};
use ktower::count::{
    count_all_closed, count_all_hypergeometric, count_towers_closed, recurrence_table,
};
use ktower::enumerate::{count_by_enumeration_parallel, enumerate_towers, TowerIter};
use ktower::tower::{render_ascii, validate};
use ktower::verify::all_suites;
use ktower::{Error, ExactInteger, Tower, TowerClassParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidTower = 3,
    Parse = 4,
    Domain = 5,
    VerificationFailed = 6,
    Exhausted = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KtMethod {
    Closed = 0,
    Recurrence = 1,
    Hypergeometric = 2,
    Enumerate = 3,
}

/// Opaque tower handle.
pub struct KtTower(Tower);

/// Opaque lazy enumeration handle.
pub struct KtEnumerator(TowerIter);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Fail(KtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidTower(_) | Error::BlockNotFound(_) => KtStatus::InvalidTower,
            Error::Json(_) => KtStatus::Parse,
            Error::Domain(_) | Error::NegativeUpperIndex(_) | Error::ZeroDenominator { .. } => {
                KtStatus::Domain
            }
            Error::InvalidParams(_) | Error::Precondition(_) => KtStatus::InvalidArgument,
            _ => KtStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KtStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            KtStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(KtStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(KtStatus::Parse, format!("{what} is not UTF-8: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s)
        .expect("engine strings contain no nul")
        .into_raw()
}

unsafe fn tower<'a>(t: *const KtTower) -> Result<&'a Tower, Fail> {
    t.as_ref().map(|t| &t.0).ok_or_else(|| null("tower"))
}

/// Message for the most recent failure on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn kt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"k":K,"blocks":[[level,x],...]}`; the result is normalized and
/// valid.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_tower_from_json(
    json: *const c_char,
    out: *mut *mut KtTower,
) -> KtStatus {
    guard(|| {
        let t = Tower::from_json(read_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(KtTower(t))))
    })
}

/// # Safety
/// `t` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn kt_tower_free(t: *mut KtTower) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_tower_to_json(t: *const KtTower, out: *mut *mut c_char) -> KtStatus {
    guard(|| {
        let s = tower(t)?.to_json();
        write_out(out, to_c(s))
    })
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_tower_render(t: *const KtTower, out: *mut *mut c_char) -> KtStatus {
    guard(|| {
        let s = render_ascii(tower(t)?);
        write_out(out, to_c(s))
    })
}

/// Block count, base size and width.
///
/// # Safety
/// `t` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_tower_shape(
    t: *const KtTower,
    k: *mut usize,
    n: *mut usize,
    b: *mut usize,
) -> KtStatus {
    guard(|| {
        let t = tower(t)?;
        write_out(k, t.k())?;
        write_out(n, t.n())?;
        write_out(b, t.b())
    })
}

/// `KT_STATUS_OK` when valid, otherwise `KT_STATUS_INVALID_TOWER` with the
/// violations in [`kt_last_error`].
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kt_tower_validate(t: *const KtTower) -> KtStatus {
    guard(|| {
        let v = validate(tower(t)?);
        if v.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidTower(v.violations).into())
        }
    })
}

/// Number of towers as a decimal string. `b = 0` counts every base size.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_count(
    k: usize,
    n: usize,
    b: usize,
    method: KtMethod,
    out: *mut *mut c_char,
) -> KtStatus {
    guard(|| {
        let bases: Vec<usize> = if b == 0 { (1..=n).collect() } else { vec![b] };
        for &b in &bases {
            TowerClassParams::new(k, n, b)?;
        }
        let total: ExactInteger = match method {
            KtMethod::Closed if b == 0 => count_all_closed(k, n)?,
            KtMethod::Closed => count_towers_closed(TowerClassParams { k, n, b }),
            KtMethod::Hypergeometric if b == 0 => count_all_hypergeometric(k, n)?,
            KtMethod::Hypergeometric => {
                return Err(Fail(
                    KtStatus::InvalidArgument,
                    "the hypergeometric method counts all base sizes; pass b = 0".into(),
                ))
            }
            KtMethod::Recurrence => {
                let table = recurrence_table(k, n)?;
                bases.iter().filter_map(|&b| table.get(n, b)).sum()
            }
            KtMethod::Enumerate => bases
                .iter()
                .map(|&b| count_by_enumeration_parallel(TowerClassParams { k, n, b }))
                .sum(),
        };
        write_out(out, to_c(total.to_string()))
    })
}

/// Reduces a tower with at least two blocks. The reduced tower goes to
/// `out_tower`, its label as JSON to `out_label`.
///
/// # Safety
/// `t` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_reduce(
    t: *const KtTower,
    out_tower: *mut *mut KtTower,
    out_label: *mut *mut c_char,
) -> KtStatus {
    guard(|| {
        let r = reduce(tower(t)?)?;
        if out_tower.is_null() || out_label.is_null() {
            return Err(null("output pointer"));
        }
        let label = serde_json::to_string(&r.label).expect("labels serialize");
        write_out(out_label, to_c(label))?;
        write_out(out_tower, Box::into_raw(Box::new(KtTower(r.tower))))
    })
}

/// Inverse of [`kt_reduce`].
///
/// # Safety
/// `t` must be a live handle, `label` a nul-terminated string, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn kt_expand(
    t: *const KtTower,
    label: *const c_char,
    out: *mut *mut KtTower,
) -> KtStatus {
    guard(|| {
        let label: ReductionLabel = serde_json::from_str(read_str(label, "label")?)
            .map_err(|e| Fail(KtStatus::Parse, format!("label: {e}")))?;
        let up = expand(tower(t)?, &label)?;
        write_out(out, Box::into_raw(Box::new(KtTower(up))))
    })
}

/// Lazily walks the `(n, b)` class in lexicographic order.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_enumerator_new(
    k: usize,
    n: usize,
    b: usize,
    out: *mut *mut KtEnumerator,
) -> KtStatus {
    guard(|| {
        let it = enumerate_towers(TowerClassParams::new(k, n, b)?);
        write_out(out, Box::into_raw(Box::new(KtEnumerator(it))))
    })
}

/// Next tower, or `KT_STATUS_EXHAUSTED` with `*out` set to null.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_enumerator_next(
    e: *mut KtEnumerator,
    out: *mut *mut KtTower,
) -> KtStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return KtStatus::NullPointer;
    }
    out.write(ptr::null_mut());
    let Some(e) = e.as_mut() else {
        set_error("enumerator is null");
        return KtStatus::NullPointer;
    };
    let mut next = None;
    let status = guard(|| {
        next = e.0.next();
        Ok(())
    });
    if status != KtStatus::Ok {
        return status;
    }
    match next {
        Some(t) => {
            out.write(Box::into_raw(Box::new(KtTower(t))));
            KtStatus::Ok
        }
        None => KtStatus::Exhausted,
    }
}

/// # Safety
/// `e` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn kt_enumerator_free(e: *mut KtEnumerator) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Runs every verification suite. The JSON report is written even when a
/// check fails, in which case the status is `KT_STATUS_VERIFICATION_FAILED`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kt_verify_all(
    max_k: usize,
    max_n: usize,
    out: *mut *mut c_char,
) -> KtStatus {
    guard(|| {
        let report = all_suites(max_k, max_n)?;
        write_out(out, to_c(report.to_json()))?;
        if report.pass {
            Ok(())
        } else {
            Err(Fail(
                KtStatus::VerificationFailed,
                "verification failed".into(),
            ))
        }
    })
}
