//! C ABI over the tspaces engine.
//!
//! Fields, spaces and polynomials are opaque handles created by `*_new` or
//! `*_parse` functions and released by the matching `*_free`. Every call
//! returns a [`TsStatus`]; on failure [`ts_last_error`] describes the cause.
//! Strings handed out by the library are freed with [`ts_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tspaces::families::TSpaceDesc;
use tspaces::linspan::{CertificateJson, MembershipVerdict};
use tspaces::replay::{parse_script, run_script};
use tspaces::rewrite::{build_rules, Target};
use tspaces::verify::check_certificate;
use tspaces::{Ambient, Error, FieldSpec, SparsePoly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BadField = 4,
    BadSpace = 5,
    FieldMismatch = 6,
    Unsupported = 7,
    TooLarge = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsVerdict {
    Member = 0,
    NonMember = 1,
    Unknown = 2,
}

pub struct TsField(FieldSpec);

pub struct TsSpace {
    field: FieldSpec,
    desc: TSpaceDesc,
}

pub struct TsPoly {
    field: FieldSpec,
    poly: SparsePoly,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TsStatus {
    match e {
        Error::NotPrime(_) | Error::ReducibleModulus(_) | Error::BadModulus(_) | Error::FieldTooLarge(_) => {
            TsStatus::BadField
        }
        Error::FieldMismatch | Error::AmbientMismatch | Error::AmbientViolation => TsStatus::FieldMismatch,
        Error::BadParams(_) | Error::UnknownLabel(_) | Error::BadSchema(_) | Error::ConstraintViolation(_) => {
            TsStatus::BadSpace
        }
        Error::BadCharacteristic { .. } | Error::UnsoundRule(_) | Error::ZeroInverse => TsStatus::Unsupported,
        Error::ExpansionOverflow(_) | Error::OracleTooLarge(_) => TsStatus::TooLarge,
        Error::Io(_) => TsStatus::Io,
        Error::Parse(_) | Error::ForwardReference { .. } => TsStatus::Parse,
    }
}

struct Fail(TsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TsStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TsStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(TsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(TsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(TsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(TsStatus::NullPointer, format!("{what} is null")));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn verdict(v: &MembershipVerdict) -> TsVerdict {
    match v {
        MembershipVerdict::Member(_) => TsVerdict::Member,
        MembershipVerdict::NonMember(_) => TsVerdict::NonMember,
        MembershipVerdict::Unknown(_) => TsVerdict::Unknown,
    }
}

fn same_field(a: &FieldSpec, b: &FieldSpec) -> Result<(), Fail> {
    if a == b {
        Ok(())
    } else {
        Err(Fail(TsStatus::FieldMismatch, "handles belong to different fields".into()))
    }
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// GF(q) with the default modulus.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_field_new(q: u64, out: *mut *mut TsField) -> TsStatus {
    guard(|| {
        let f = FieldSpec::with_order(q)?;
        put(out, Box::into_raw(Box::new(TsField(f))), "out")
    })
}

/// # Safety
/// `f` must come from [`ts_field_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ts_field_free(f: *mut TsField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live field handle.
#[no_mangle]
pub unsafe extern "C" fn ts_field_order(f: *const TsField) -> u64 {
    f.as_ref().map_or(0, |f| f.0.q() as u64)
}

/// Parses a polynomial in `k[x]_0`, or in `k[x]` when `unitary` is set.
///
/// # Safety
/// `f` must be a live field handle, `text` a nul-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_poly_parse(
    f: *const TsField,
    text: *const c_char,
    unitary: bool,
    out: *mut *mut TsPoly,
) -> TsStatus {
    guard(|| {
        let f = &handle(f, "field")?.0;
        let amb = if unitary { Ambient::Unitary } else { Ambient::Nonunitary };
        let poly = SparsePoly::parse(f, c_str(text, "text")?, amb)?;
        put(out, Box::into_raw(Box::new(TsPoly { field: f.clone(), poly })), "out")
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ts_poly_free(p: *mut TsPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical text form; free with [`ts_string_free`].
///
/// # Safety
/// `p` must be a live polynomial handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_poly_to_text(p: *const TsPoly, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        let p = handle(p, "poly")?;
        put(out, owned(p.poly.to_text(&p.field)), "out")
    })
}

/// A space such as `W:1`, `V:0+V:1` or `W0`.
///
/// # Safety
/// `f` must be a live field handle, `names` a nul-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_space_parse(f: *const TsField, names: *const c_char, out: *mut *mut TsSpace) -> TsStatus {
    guard(|| {
        let f = &handle(f, "field")?.0;
        let desc = TSpaceDesc::parse(f, c_str(names, "names")?)?;
        put(out, Box::into_raw(Box::new(TsSpace { field: f.clone(), desc })), "out")
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ts_space_free(s: *mut TsSpace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

unsafe fn report(
    s: &TsSpace,
    g: &SparsePoly,
    v: &MembershipVerdict,
    out_verdict: *mut TsVerdict,
    out_cert: *mut *mut c_char,
) -> Result<(), Fail> {
    put(out_verdict, verdict(v), "out_verdict")?;
    if !out_cert.is_null() {
        let cert = CertificateJson::new(&s.field, Some(&s.desc.name()), g, v);
        out_cert.write(owned(serde_json::to_string(&cert).expect("serializable")));
    }
    Ok(())
}

/// Decides membership of `p` in `s`. When `out_cert` is not null it
/// receives the certificate as JSON.
///
/// # Safety
/// Handles must be live; `out_verdict` must be valid for writes and
/// `out_cert` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_member(
    s: *const TsSpace,
    p: *const TsPoly,
    cutoff: u64,
    out_verdict: *mut TsVerdict,
    out_cert: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        let s = handle(s, "space")?;
        let p = handle(p, "poly")?;
        same_field(&s.field, &p.field)?;
        let v = s.desc.decide(&p.poly, cutoff)?;
        report(s, &p.poly, &v, out_verdict, out_cert)
    })
}

/// Whether `x` lies in `s`, i.e. `s` is all of `k[x]_0`.
///
/// # Safety
/// As for [`ts_member`].
#[no_mangle]
pub unsafe extern "C" fn ts_covers(
    s: *const TsSpace,
    cutoff: u64,
    out_verdict: *mut TsVerdict,
    out_cert: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        let s = handle(s, "space")?;
        let v = s.desc.covers_all(cutoff)?;
        report(s, &SparsePoly::x(), &v, out_verdict, out_cert)
    })
}

/// Canonical form of `p` modulo `W1` or `W2` over GF(2).
///
/// # Safety
/// `p` must be a live handle, `target` a nul-terminated string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_reduce(p: *const TsPoly, target: *const c_char, out: *mut *mut TsPoly) -> TsStatus {
    guard(|| {
        let p = handle(p, "poly")?;
        let sys = build_rules(&p.field, Target::parse(c_str(target, "target")?)?)?;
        let red = sys.reduce_canonical(&p.poly)?;
        put(out, Box::into_raw(Box::new(TsPoly { field: p.field.clone(), poly: red.canonical })), "out")
    })
}

/// Replays a derivation script given as JSON text. `out_report`, when not
/// null, receives the step-by-step report.
///
/// # Safety
/// `script` must be a nul-terminated string; `out_passed` valid for
/// writes; `out_report` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_replay(
    script: *const c_char,
    out_passed: *mut bool,
    out_report: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        let script = parse_script(c_str(script, "script")?)?;
        let r = run_script(&script);
        put(out_passed, r.passed, "out_passed")?;
        if !out_report.is_null() {
            out_report.write(owned(serde_json::to_string(&r).expect("serializable")));
        }
        Ok(())
    })
}

/// Validates a certificate JSON without searching. `out_valid` is false
/// and [`ts_last_error`] empty when the certificate parses but is wrong;
/// `out_reason` then receives why.
///
/// # Safety
/// `cert` must be a nul-terminated string; `out_valid` valid for writes;
/// `out_reason` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ts_check_certificate(
    cert: *const c_char,
    out_valid: *mut bool,
    out_reason: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        let cert: CertificateJson =
            serde_json::from_str(c_str(cert, "cert")?).map_err(|e| Fail(TsStatus::Parse, e.to_string()))?;
        let res = check_certificate(&cert);
        put(out_valid, res.is_ok(), "out_valid")?;
        if !out_reason.is_null() {
            out_reason.write(match res {
                Ok(()) => ptr::null_mut(),
                Err(why) => owned(why),
            });
        }
        Ok(())
    })
}
