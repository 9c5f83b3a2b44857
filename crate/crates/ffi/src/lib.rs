//! C ABI over the `famtrans` calculators.
//!
//! Conventions:
//! - Every fallible function returns an [`FtStatus`] and writes its result
//!   through an out-pointer only on [`FtStatus::Ok`].
//! - Handles (`FtRule`, `FtSet`, `FtPoint`) are opaque, owned by the caller
//!   and released with the matching `*_free` function. Freeing null is a no-op.
//! - Strings returned through `char **` are NUL-terminated UTF-8 and must be
//!   released with [`ft_string_free`].
//! - After a failure, [`ft_last_error`] describes it until the next call on
//!   the same thread.
//! - Panics never cross the boundary; they surface as [`FtStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use famtrans::dynamics::{check_a_transitive, check_delta_a_transitive};
use famtrans::families::FamilyQuery;
use famtrans::intset::WindowedSet;
use famtrans::points::{build_transitive_point, champernowne, periodic, GeneratedPoint};
use famtrans::subshift::{hitting_window, Cylinder, ShiftRule, Word};
use famtrans::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Config = 4,
    HorizonExhausted = 5,
    CapExceeded = 6,
    Precondition = 7,
    SpacerExhausted = 8,
    Io = 9,
    Panic = 10,
}

/// A shift rule.
pub struct FtRule(ShiftRule);

/// A windowed set of non-negative integers.
pub struct FtSet(WindowedSet);

/// A finite prefix of a point of a subshift.
pub struct FtPoint(GeneratedPoint);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FtStatus {
    match e {
        Error::Config(_) => FtStatus::Config,
        Error::Parse { .. } => FtStatus::Parse,
        Error::HorizonExhausted { .. } => FtStatus::HorizonExhausted,
        Error::CapExceeded { .. } => FtStatus::CapExceeded,
        Error::Precondition(_) => FtStatus::Precondition,
        Error::SpacerExhausted { .. } => FtStatus::SpacerExhausted,
        Error::Io(_) => FtStatus::Io,
    }
}

struct Fail(FtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FtStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, record any failure, and map it to a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FtStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FtStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            FtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FtStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn word_arg(p: *const u8, len: usize, what: &str) -> Result<Word, Fail> {
    Ok(Word::new(slice_arg(p, len, what)?.to_vec())?)
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(FtStatus::Io, "string contains NUL".into()))?;
    write_out(out, c.into_raw())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Fail> {
    serde_json::to_string(v).map_err(|e| Fail(FtStatus::Io, e.to_string()))
}

/// Message for the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a rule literal such as `spacing(dyadic())`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_rule_parse(text: *const c_char, out: *mut *mut FtRule) -> FtStatus {
    guard(|| {
        let rule: ShiftRule = str_arg(text, "text")?.parse()?;
        write_out(out, Box::into_raw(Box::new(FtRule(rule))))
    })
}

/// # Safety
/// `rule` must be null or a live handle from [`ft_rule_parse`].
#[no_mangle]
pub unsafe extern "C" fn ft_rule_free(rule: *mut FtRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// Canonical literal of a rule.
///
/// # Safety
/// `rule` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_rule_to_string(rule: *const FtRule, out: *mut *mut c_char) -> FtStatus {
    guard(|| write_string(out, ref_arg(rule, "rule")?.0.to_string()))
}

/// Whether a finite word over {0,1} is admissible.
///
/// # Safety
/// `symbols` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_rule_is_admissible(
    rule: *const FtRule,
    symbols: *const u8,
    len: usize,
    out: *mut bool,
) -> FtStatus {
    guard(|| {
        let w = word_arg(symbols, len, "symbols")?;
        write_out(out, ref_arg(rule, "rule")?.0.is_admissible(&w))
    })
}

/// A window `[0, horizon)` holding `members` (any order, duplicates allowed).
///
/// # Safety
/// `members` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_set_new(horizon: u64, members: *const u64, len: usize, out: *mut *mut FtSet) -> FtStatus {
    guard(|| {
        let m = slice_arg(members, len, "members")?;
        let s = WindowedSet::new(horizon, m.iter().copied())?;
        write_out(out, Box::into_raw(Box::new(FtSet(s))))
    })
}

/// # Safety
/// `set` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ft_set_free(set: *mut FtSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of members and window bound.
///
/// # Safety
/// `set` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_set_info(set: *const FtSet, len: *mut usize, horizon: *mut u64) -> FtStatus {
    guard(|| {
        let s = &ref_arg(set, "set")?.0;
        write_out(len, s.len())?;
        write_out(horizon, s.horizon())
    })
}

/// Copy up to `cap` members into `buf`; `written` receives the count copied.
///
/// # Safety
/// `buf` must have room for `cap` values; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_set_members(set: *const FtSet, buf: *mut u64, cap: usize, written: *mut usize) -> FtStatus {
    guard(|| {
        let m = ref_arg(set, "set")?.0.members();
        let n = m.len().min(cap);
        if n > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(m.as_ptr(), buf, n);
        }
        write_out(written, n)
    })
}

/// Difference set `{b - a : a < b members}` on the same window.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_set_difference(set: *const FtSet, out: *mut *mut FtSet) -> FtStatus {
    guard(|| {
        let d = ref_arg(set, "set")?.0.difference_set();
        write_out(out, Box::into_raw(Box::new(FtSet(d))))
    })
}

/// Evaluate a family query (e.g. `nabla(thick(4))`, `fa(1,2;3,64)`) on a set
/// and return the report as JSON.
///
/// # Safety
/// `set` must be a live handle; `query` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_family_report(set: *const FtSet, query: *const c_char, out: *mut *mut c_char) -> FtStatus {
    guard(|| {
        let q: FamilyQuery = str_arg(query, "query")?.parse()?;
        let r = q.evaluate(&ref_arg(set, "set")?.0)?;
        write_string(out, to_json(&r)?)
    })
}

/// Hitting times `n` in `[1, horizon]` of the cylinders `[u]` and `[v]`,
/// both anchored at position 0.
///
/// # Safety
/// `u`, `v` must point to `ulen`, `vlen` readable bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_hitting_window(
    rule: *const FtRule,
    u: *const u8,
    ulen: usize,
    v: *const u8,
    vlen: usize,
    horizon: u64,
    out: *mut *mut FtSet,
) -> FtStatus {
    guard(|| {
        let rule = &ref_arg(rule, "rule")?.0;
        let u = Cylinder::at_origin(word_arg(u, ulen, "u")?);
        let v = Cylinder::at_origin(word_arg(v, vlen, "v")?);
        let s = hitting_window(rule, &u, &v, horizon)?;
        write_out(out, Box::into_raw(Box::new(FtSet(s))))
    })
}

/// Sweep all cylinder tuples for `a`-transitivity (`diagonal == false`) or
/// diagonal `a`-transitivity (`diagonal == true`); returns the report as JSON.
///
/// # Safety
/// `a` must point to `alen` readable values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_check_transitivity(
    rule: *const FtRule,
    a: *const u64,
    alen: usize,
    wordlen: usize,
    horizon: u64,
    diagonal: bool,
    out: *mut *mut c_char,
) -> FtStatus {
    guard(|| {
        let rule = &ref_arg(rule, "rule")?.0;
        let a = slice_arg(a, alen, "a")?;
        let r = if diagonal {
            check_delta_a_transitive(rule, a, wordlen, horizon)?
        } else {
            check_a_transitive(rule, a, wordlen, horizon)?
        };
        write_string(out, to_json(&r)?)
    })
}

/// Champernowne prefix containing every binary word of length `<= scale`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_point_champernowne(scale: usize, out: *mut *mut FtPoint) -> FtStatus {
    guard(|| write_out(out, Box::into_raw(Box::new(FtPoint(champernowne(scale)?)))))
}

/// Greedy transitive point for `rule` covering words of length `<= scale`,
/// with prefix length at least `min_len`.
///
/// # Safety
/// `rule` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_point_greedy(
    rule: *const FtRule,
    scale: usize,
    spacer_max: u64,
    min_len: usize,
    out: *mut *mut FtPoint,
) -> FtStatus {
    guard(|| {
        let p = build_transitive_point(&ref_arg(rule, "rule")?.0, scale, spacer_max, min_len)?;
        write_out(out, Box::into_raw(Box::new(FtPoint(p))))
    })
}

/// Prefix of length `len` of the periodic point `w w w ...`.
///
/// # Safety
/// `word` must point to `wlen` readable bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_point_periodic(word: *const u8, wlen: usize, len: usize, out: *mut *mut FtPoint) -> FtStatus {
    guard(|| {
        let p = periodic(&word_arg(word, wlen, "word")?, len)?;
        write_out(out, Box::into_raw(Box::new(FtPoint(p))))
    })
}

/// # Safety
/// `point` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ft_point_free(point: *mut FtPoint) {
    if !point.is_null() {
        drop(Box::from_raw(point));
    }
}

/// Length of the point prefix.
///
/// # Safety
/// `point` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_point_len(point: *const FtPoint, out: *mut usize) -> FtStatus {
    guard(|| write_out(out, ref_arg(point, "point")?.0.len()))
}

/// Entering times of the point into `[u]` within `[1, h]`.
///
/// # Safety
/// `u` must point to `ulen` readable bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_point_entering_window(
    point: *const FtPoint,
    u: *const u8,
    ulen: usize,
    h: u64,
    out: *mut *mut FtSet,
) -> FtStatus {
    guard(|| {
        let u = word_arg(u, ulen, "u")?;
        let s = ref_arg(point, "point")?.0.entering_window(&u, h)?;
        write_out(out, Box::into_raw(Box::new(FtSet(s))))
    })
}
