//! C ABI for flagcert.
//!
//! Every fallible function returns an [`FcStatus`]. On failure a message is
//! kept per thread and can be fetched with [`fc_last_error`]. Strings handed
//! out by this library are owned by the caller and released with
//! [`fc_string_free`]; handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flagcert::{certify, density, enumerate_flags, Certificate, Flag, FlagBasis, Graph, TypeGraph};
use libc::c_char;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    VerificationFailed = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Parsed certificate.
pub struct FcCertificate {
    inner: Certificate,
}

/// Flags of one type and size, in canonical order.
pub struct FcBasis {
    inner: FlagBasis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: FcStatus, message: impl Into<String>) -> FcStatus {
    set_error(message);
    status
}

/// Runs `f`, converting panics into [`FcStatus::Panic`].
fn guard(f: impl FnOnce() -> FcStatus) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(FcStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, FcStatus> {
    if p.is_null() {
        return Err(fail(FcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FcStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FcStatus {
    if out.is_null() {
        return fail(FcStatus::NullPointer, "null output pointer");
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FcStatus::Ok
        }
        Err(_) => fail(FcStatus::InvalidArgument, "string contains a NUL byte"),
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL. The caller
/// frees the copy with [`fc_string_free`].
#[no_mangle]
pub extern "C" fn fc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses certificate text into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_certificate_parse(text: *const c_char, out: *mut *mut FcCertificate) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null output pointer");
        }
        let text = try_ffi!(read_str(text));
        match Certificate::parse(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FcCertificate { inner }));
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::ParseError, e.to_string()),
        }
    })
}

/// Verifies the certificate with exact arithmetic. On success the recomputed
/// bound is written to `*bound` as `numerator/denominator`; `bound` may be
/// NULL.
///
/// # Safety
/// `cert` must be a live handle; `bound` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn fc_certificate_verify(cert: *const FcCertificate, bound: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let Some(cert) = cert.as_ref() else {
            return fail(FcStatus::NullPointer, "null certificate");
        };
        match certify::verify(&cert.inner) {
            Ok(_) if bound.is_null() => FcStatus::Ok,
            Ok(value) => write_string(bound, certify::fraction(&value)),
            Err(e) => fail(FcStatus::VerificationFailed, e.to_string()),
        }
    })
}

/// Claimed bound as `numerator/denominator`.
///
/// # Safety
/// `cert` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_certificate_bound(cert: *const FcCertificate, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let Some(cert) = cert.as_ref() else {
            return fail(FcStatus::NullPointer, "null certificate");
        };
        write_string(out, certify::fraction(&cert.inner.bound))
    })
}

/// Canonical text encoding of the certificate.
///
/// # Safety
/// `cert` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_certificate_to_string(cert: *const FcCertificate, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let Some(cert) = cert.as_ref() else {
            return fail(FcStatus::NullPointer, "null certificate");
        };
        write_string(out, cert.inner.to_text())
    })
}

/// # Safety
/// `cert` must be NULL or a handle from [`fc_certificate_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_certificate_free(cert: *mut FcCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Enumerates the flags with `size` vertices over the type whose adjacency is
/// given by `type_bits` (upper-triangular rows on `type_order` vertices).
///
/// # Safety
/// `type_bits` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_basis_new(
    type_order: usize,
    type_bits: *const c_char,
    size: usize,
    out: *mut *mut FcBasis,
) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullPointer, "null output pointer");
        }
        let bits = try_ffi!(read_str(type_bits));
        let ty = match Graph::from_upper_triangle_on(type_order, bits) {
            Ok(g) => TypeGraph::new(g),
            Err(e) => return fail(FcStatus::InvalidArgument, e.to_string()),
        };
        match enumerate_flags(&ty, size) {
            Ok(basis) => {
                *out = Box::into_raw(Box::new(FcBasis { inner: basis }));
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Number of flags in the basis, or 0 for a NULL handle.
///
/// # Safety
/// `basis` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_basis_len(basis: *const FcBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.inner.len())
}

/// Adjacency bitstring of flag `index`; its roots are the leading vertices.
///
/// # Safety
/// `basis` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_basis_flag_bits(basis: *const FcBasis, index: usize, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let Some(basis) = basis.as_ref() else {
            return fail(FcStatus::NullPointer, "null basis");
        };
        if index >= basis.inner.len() {
            return fail(
                FcStatus::OutOfRange,
                format!("index {index} out of range for {} flags", basis.inner.len()),
            );
        }
        write_string(out, basis.inner.get(index).graph().upper_triangle())
    })
}

/// # Safety
/// `basis` must be NULL or a handle from [`fc_basis_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_basis_free(basis: *mut FcBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

unsafe fn read_flag(order: usize, bits: *const c_char, roots: usize) -> Result<Flag, FcStatus> {
    let bits = read_str(bits)?;
    let g = Graph::from_upper_triangle_on(order, bits).map_err(|e| fail(FcStatus::InvalidArgument, e.to_string()))?;
    Flag::rooted_prefix(g, roots).map_err(|e| fail(FcStatus::InvalidArgument, e.to_string()))
}

/// Induced density of the small flag in the large flag, both rooted at their
/// first `roots` vertices, written as `numerator/denominator`.
///
/// # Safety
/// Both bitstrings must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_density(
    roots: usize,
    small_order: usize,
    small_bits: *const c_char,
    large_order: usize,
    large_bits: *const c_char,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let small = try_ffi!(read_flag(small_order, small_bits, roots));
        let large = try_ffi!(read_flag(large_order, large_bits, roots));
        match density(&small, &large) {
            Ok(p) => write_string(out, certify::fraction(&p)),
            Err(e) => fail(FcStatus::InvalidArgument, e.to_string()),
        }
    })
}
