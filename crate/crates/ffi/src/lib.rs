//! C ABI over the kwstruct account compiler.
//!
//! Accounts are opaque `KwsAccount` handles. Every fallible call returns a
//! `KwsStatus`; on failure `kws_last_error_message` describes the error for
//! the calling thread. Strings handed out by the library must be released
//! with `kws_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io::Cursor;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kwstruct::account::simulate;
use kwstruct::bounds::{nk_exact, nk_worst_case_optimal};
use kwstruct::rules::{read_brand_list, read_rules_jsonl, ItemId};
use kwstruct::update::{add_rule, remove_rule, Case2Strategy, UpdateConfig};
use kwstruct::verify::{verify, ProbeConfig};
use kwstruct::{build_account, normalize, Account, BuildConfig, BuildInput, Error, Mode, Money, Rule};

pub const KWS_MODE_NAIVE: u32 = 0;
pub const KWS_MODE_REDUCED: u32 = 1;

pub const KWS_STRATEGY_NEW_CAMPAIGN: u32 = 0;
pub const KWS_STRATEGY_MIN_NEGATIVES: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KwsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    LimitExceeded = 5,
    VerificationFailed = 6,
    Panic = 7,
}

/// Opaque account handle.
pub struct KwsAccount {
    inner: Account,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(KwsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } | Error::MalformedKeyword(_) | Error::MalformedToken(_) => KwsStatus::ParseError,
            Error::LimitExceeded { .. } => KwsStatus::LimitExceeded,
            _ => KwsStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

/// Run `f`, turning errors and panics into a status plus the thread's message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KwsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KwsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            KwsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(KwsStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(KwsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn account<'a>(p: *const KwsAccount) -> Result<&'a Account, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| Fail(KwsStatus::NullArgument, "account is null".into()))
}

unsafe fn account_mut<'a>(p: *mut KwsAccount) -> Result<&'a mut Account, Fail> {
    p.as_mut().map(|h| &mut h.inner).ok_or_else(|| Fail(KwsStatus::NullArgument, "account is null".into()))
}

/// Hand a string to the caller; a null `out` discards it.
unsafe fn give(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Ok(());
    }
    let c = CString::new(s).map_err(|_| Fail(KwsStatus::InvalidInput, "output holds a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn ser(e: serde_json::Error) -> Fail {
    Fail(KwsStatus::InvalidInput, e.to_string())
}

fn brands(text: Option<&str>) -> Result<Vec<kwstruct::Keyword>, Fail> {
    Ok(read_brand_list(Cursor::new(text.unwrap_or_default()))?)
}

/// Build an account from rules as JSON lines and brand lists as newline
/// separated text (`brands` and `non_brands` may be null).
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kws_account_build(
    rules_jsonl: *const c_char,
    brands_text: *const c_char,
    non_brands_text: *const c_char,
    mode: u32,
    out: *mut *mut KwsAccount,
) -> KwsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(KwsStatus::NullArgument, "out is null".into()));
        }
        let mode = match mode {
            KWS_MODE_NAIVE => Mode::Naive,
            KWS_MODE_REDUCED => Mode::Reduced,
            other => return Err(Fail(KwsStatus::InvalidInput, format!("unknown mode {other}"))),
        };
        let rules = read_rules_jsonl(Cursor::new(text(rules_jsonl, "rules")?))?;
        let sb = brands(optional_text(brands_text, "brands")?)?;
        let snb = brands(optional_text(non_brands_text, "non_brands")?)?;
        let a = build_account(&BuildInput::new(rules, sb, snb, BuildConfig { mode, ..BuildConfig::default() }))?;
        *out = Box::into_raw(Box::new(KwsAccount { inner: a }));
        Ok(())
    })
}

/// # Safety
/// `json` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kws_account_from_json(json_text: *const c_char, out: *mut *mut KwsAccount) -> KwsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(KwsStatus::NullArgument, "out is null".into()));
        }
        let a = Account::from_json(text(json_text, "json")?)?;
        *out = Box::into_raw(Box::new(KwsAccount { inner: a }));
        Ok(())
    })
}

/// Canonical snapshot JSON of the account.
///
/// # Safety
/// `account` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kws_account_to_json(account_ptr: *const KwsAccount, out: *mut *mut c_char) -> KwsStatus {
    guard(|| {
        let a = account(account_ptr)?;
        give(out, a.to_json())
    })
}

/// # Safety
/// `account` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn kws_account_free(account_ptr: *mut KwsAccount) {
    if !account_ptr.is_null() {
        drop(Box::from_raw(account_ptr));
    }
}

/// Trace one query; the trajectory is written as JSON.
///
/// # Safety
/// `account` must come from this library; `query` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn kws_simulate(
    account_ptr: *const KwsAccount,
    query: *const c_char,
    out_json: *mut *mut c_char,
) -> KwsStatus {
    guard(|| {
        let a = account(account_ptr)?;
        let q = normalize(text(query, "query")?)?;
        give(out_json, serde_json::to_string(&simulate(a, &q)).map_err(ser)?)
    })
}

/// Check the routing properties. Returns `KWS_STATUS_VERIFICATION_FAILED`
/// when any check fails; the report is written either way.
///
/// # Safety
/// `account` must come from this library; `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn kws_verify(
    account_ptr: *const KwsAccount,
    seed: u64,
    probes: usize,
    out_report: *mut *mut c_char,
) -> KwsStatus {
    guard(|| {
        let a = account(account_ptr)?;
        let report = verify(a, ProbeConfig { probes, seed })?;
        give(out_report, serde_json::to_string(&report).map_err(ser)?)?;
        if report.passed() {
            Ok(())
        } else {
            Err(Fail(KwsStatus::VerificationFailed, "verification failed".into()))
        }
    })
}

/// Add a rule in place. `items` is a comma separated list of item ids.
/// The change log is written as JSON when `out_changes` is not null.
///
/// # Safety
/// `account` must come from this library; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn kws_account_add_rule(
    account_ptr: *mut KwsAccount,
    keyword: *const c_char,
    cpc_micros: u64,
    items: *const c_char,
    strategy: u32,
    out_changes: *mut *mut c_char,
) -> KwsStatus {
    guard(|| {
        let a = account_mut(account_ptr)?;
        let strategy = match strategy {
            KWS_STRATEGY_NEW_CAMPAIGN => Case2Strategy::NewCampaign,
            KWS_STRATEGY_MIN_NEGATIVES => Case2Strategy::MinNegatives,
            other => return Err(Fail(KwsStatus::InvalidInput, format!("unknown strategy {other}"))),
        };
        let items = text(items, "items")?
            .split(',')
            .map(|s| ItemId::new(s.trim()))
            .collect::<Result<_, _>>()?;
        let rule = Rule::new(normalize(text(keyword, "keyword")?)?, Money(cpc_micros), items)?;
        let outcome = add_rule(a, &rule, &UpdateConfig { strategy, ..UpdateConfig::default() })?;
        give(out_changes, serde_json::to_string(&outcome.changes).map_err(ser)?)?;
        *a = outcome.account;
        Ok(())
    })
}

/// Remove a rule in place.
///
/// # Safety
/// `account` must come from this library; `keyword` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn kws_account_remove_rule(
    account_ptr: *mut KwsAccount,
    keyword: *const c_char,
    out_changes: *mut *mut c_char,
) -> KwsStatus {
    guard(|| {
        let a = account_mut(account_ptr)?;
        let outcome = remove_rule(a, &normalize(text(keyword, "keyword")?)?, &UpdateConfig::default())?;
        give(out_changes, serde_json::to_string(&outcome.changes).map_err(ser)?)?;
        *a = outcome.account;
        Ok(())
    })
}

/// m² + (√n + 2)m' + 2n√n.
#[no_mangle]
pub extern "C" fn kws_bounds_worst_case(n: u64, m: u64, m_prime: u64) -> f64 {
    nk_worst_case_optimal(n, m, m_prime).value
}

/// Exact naive count for the given group sizes; 0 when `parts` is null.
///
/// # Safety
/// `parts` must point to `len` readable values.
#[no_mangle]
pub unsafe extern "C" fn kws_nk_exact(m: u64, m_prime: u64, parts: *const u64, len: usize) -> u64 {
    if parts.is_null() {
        return 0;
    }
    nk_exact(m, m_prime, std::slice::from_raw_parts(parts, len))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn kws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn kws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
