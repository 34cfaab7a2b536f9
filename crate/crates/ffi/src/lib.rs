//! C interface.
//!
//! Every fallible function returns an [`AspnfStatus`] and writes its result
//! through an out pointer. On failure [`aspnf_last_error`] describes the
//! problem until the next call on the same thread. Objects returned through
//! out pointers are owned by the caller and released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use aspnf::kernel::{check_kernel, kernelize};
use aspnf::normalize::{check_3kernel, three_kernelize};
use aspnf::semantics::{enumerate_answer_sets_with, EnumOptions};
use aspnf::text::{parse_program_with, render_atom_set, ParseOptions};
use aspnf::{Error, Program};

/// Opaque parsed program.
pub struct AspnfProgram(Program);

/// Opaque list of answer sets, each pre-rendered as `{a, b}`.
pub struct AspnfAnswerSets(Vec<CString>);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AspnfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    InvalidAtom = 4,
    TooLarge = 5,
    Precondition = 6,
    OutOfRange = 7,
    Internal = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn fail(status: AspnfStatus, message: impl Into<String>) -> AspnfStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> AspnfStatus {
    let status = match &e {
        Error::Syntax { .. } => AspnfStatus::Syntax,
        Error::InvalidAtom(_) | Error::ReservedAtom(_) => AspnfStatus::InvalidAtom,
        Error::UniverseTooLarge { .. } | Error::CycleCapExceeded { .. } => AspnfStatus::TooLarge,
        Error::Precondition(_) => AspnfStatus::Precondition,
        _ => AspnfStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(body: impl FnOnce() -> AspnfStatus) -> AspnfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(AspnfStatus::Internal, "internal panic"))
}

fn options(max_atoms: usize) -> EnumOptions {
    let options = EnumOptions::from_env();
    if max_atoms == 0 {
        options
    } else {
        options.with_max_atoms(max_atoms)
    }
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text).expect("rendered text has no nul bytes").into_raw()
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn aspnf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a program in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aspnf_parse(
    text: *const c_char,
    allow_reserved: bool,
    out: *mut *mut AspnfProgram,
) -> AspnfStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(AspnfStatus::NullArgument, "null argument");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(AspnfStatus::InvalidUtf8, "input is not UTF-8");
        };
        match parse_program_with(text, ParseOptions { allow_reserved }) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(AspnfProgram(p)));
                AspnfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `program` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn aspnf_program_free(program: *mut AspnfProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// # Safety
/// `s` must be a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn aspnf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Renders the program, one rule per line. Free with `aspnf_string_free`.
///
/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aspnf_program_render(program: *const AspnfProgram, out: *mut *mut c_char) -> AspnfStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(AspnfStatus::NullArgument, "null argument");
        };
        *out = into_c_string(p.0.to_string());
        AspnfStatus::Ok
    })
}

/// # Safety
/// `program` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn aspnf_program_rule_count(program: *const AspnfProgram) -> usize {
    program.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `program` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn aspnf_program_atom_count(program: *const AspnfProgram) -> usize {
    program.as_ref().map_or(0, |p| p.0.atoms().len())
}

/// Enumerates answer sets. `max_atoms` of 0 keeps the default cap.
///
/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aspnf_solve(
    program: *const AspnfProgram,
    max_atoms: usize,
    out: *mut *mut AspnfAnswerSets,
) -> AspnfStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(AspnfStatus::NullArgument, "null argument");
        };
        match enumerate_answer_sets_with(&p.0, &options(max_atoms)) {
            Ok(sets) => {
                let rendered = sets.iter().map(|s| CString::new(render_atom_set(s)).expect("no nul bytes")).collect();
                *out = Box::into_raw(Box::new(AspnfAnswerSets(rendered)));
                AspnfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `sets` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn aspnf_answer_sets_len(sets: *const AspnfAnswerSets) -> usize {
    sets.as_ref().map_or(0, |s| s.0.len())
}

/// Borrowed `{a, b}` rendering of answer set `index`, valid while `sets` lives.
///
/// # Safety
/// `sets` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aspnf_answer_sets_get(
    sets: *const AspnfAnswerSets,
    index: usize,
    out: *mut *const c_char,
) -> AspnfStatus {
    guard(|| {
        let (Some(sets), false) = (sets.as_ref(), out.is_null()) else {
            return fail(AspnfStatus::NullArgument, "null argument");
        };
        match sets.0.get(index) {
            Some(s) => {
                *out = s.as_ptr();
                AspnfStatus::Ok
            }
            None => fail(AspnfStatus::OutOfRange, format!("index {index} out of range ({} sets)", sets.0.len())),
        }
    })
}

/// # Safety
/// `sets` must come from `aspnf_solve` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn aspnf_answer_sets_free(sets: *mut AspnfAnswerSets) {
    if !sets.is_null() {
        drop(Box::from_raw(sets));
    }
}

/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aspnf_check_kernel(program: *const AspnfProgram, out: *mut bool) -> AspnfStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(AspnfStatus::NullArgument, "null argument");
        };
        *out = check_kernel(&p.0).is_kernel;
        AspnfStatus::Ok
    })
}

/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aspnf_check_3kernel(program: *const AspnfProgram, out: *mut bool) -> AspnfStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(AspnfStatus::NullArgument, "null argument");
        };
        match check_3kernel(&p.0) {
            Ok(report) => {
                *out = report.is_3kernel;
                AspnfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs the 3-kernel pipeline. When `trace_json` is not NULL it receives the
/// trace as JSON, to be freed with `aspnf_string_free`.
///
/// # Safety
/// `program` must be a live handle; `out` must be writable; `trace_json` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn aspnf_three_kernelize(
    program: *const AspnfProgram,
    out: *mut *mut AspnfProgram,
    trace_json: *mut *mut c_char,
) -> AspnfStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(AspnfStatus::NullArgument, "null argument");
        };
        match three_kernelize(&p.0) {
            Ok((result, trace)) => {
                if !trace_json.is_null() {
                    *trace_json = into_c_string(trace.to_json());
                }
                *out = Box::into_raw(Box::new(AspnfProgram(result)));
                AspnfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Kernel program with the same answer sets modulo projection on the input atoms.
///
/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aspnf_kernelize(
    program: *const AspnfProgram,
    max_atoms: usize,
    out: *mut *mut AspnfProgram,
) -> AspnfStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(AspnfStatus::NullArgument, "null argument");
        };
        match kernelize(&p.0, &options(max_atoms)) {
            Ok((kernel, _)) => {
                *out = Box::into_raw(Box::new(AspnfProgram(kernel)));
                AspnfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
