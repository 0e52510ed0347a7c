//! C ABI over the gct engine.
//!
//! Strings returned by this library are owned by the caller and released with
//! [`gct_string_free`]. Workspaces are released with [`gct_workspace_free`].
//! On any non-`Ok` status a description is available from
//! [`gct_last_error_message`] until the next call on the same thread.

use gct::catalogue;
use gct::dsl::{parse_workspace, print_workspace, CheckKind, CheckRequest, Workspace};
use gct::report::{run_report, RunOptions};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GctStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownEntry = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// Opaque parsed workspace.
pub struct GctWorkspace(Workspace);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

struct Failure(GctStatus, String);

/// Runs `body`, converting failures and panics into a status plus message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GctStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GctStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GctStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(GctStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GctStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("NUL bytes replaced")
        .into_raw()
}

/// # Safety
/// `out` is null or valid for writes.
unsafe fn store(out: *mut *mut GctWorkspace, w: Workspace) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(GctStatus::NullArgument, "out is null".into()));
    }
    *out = Box::into_raw(Box::new(GctWorkspace(w)));
    Ok(())
}

/// Parses `.gct` source text into a new workspace written to `*out`.
///
/// # Safety
/// `text` is a NUL-terminated string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gct_workspace_parse(
    text: *const c_char,
    out: *mut *mut GctWorkspace,
) -> GctStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        let w = parse_workspace(text).map_err(|e| Failure(GctStatus::ParseError, e.to_string()))?;
        store(out, w)
    })
}

/// Loads a catalogue entry such as `heisenberg` or `r2n1-new(3)`.
///
/// # Safety
/// `id` is a NUL-terminated string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gct_workspace_from_catalogue(
    id: *const c_char,
    out: *mut *mut GctWorkspace,
) -> GctStatus {
    guard(|| {
        let id = read_str(id, "id")?;
        let w = catalogue::load(id).map_err(|e| match e {
            catalogue::CatalogueError::Parse { .. } => {
                Failure(GctStatus::ParseError, e.to_string())
            }
            _ => Failure(GctStatus::UnknownEntry, e.to_string()),
        })?;
        store(out, w)
    })
}

/// Canonical source text of a workspace, or null on failure.
///
/// # Safety
/// `w` is null or a workspace returned by this library.
#[no_mangle]
pub unsafe extern "C" fn gct_workspace_print(w: *const GctWorkspace) -> *mut c_char {
    let mut text = ptr::null_mut();
    guard(|| {
        let w = w
            .as_ref()
            .ok_or_else(|| Failure(GctStatus::NullArgument, "workspace is null".into()))?;
        text = into_c_string(print_workspace(&w.0));
        Ok(())
    });
    text
}

/// Runs checks and writes the JSON report to `*json_out` and the verdict to `*passed`.
///
/// `checks` is a comma-separated list of check names, or null for the workspace's own.
/// `samples` of zero selects the default sample count.
///
/// # Safety
/// `w` is a workspace returned by this library, `checks` is null or NUL-terminated,
/// and `json_out` and `passed` are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gct_run_report(
    w: *const GctWorkspace,
    checks: *const c_char,
    samples: u32,
    seed: u64,
    json_out: *mut *mut c_char,
    passed: *mut bool,
) -> GctStatus {
    guard(|| {
        let w = w
            .as_ref()
            .ok_or_else(|| Failure(GctStatus::NullArgument, "workspace is null".into()))?;
        if json_out.is_null() || passed.is_null() {
            return Err(Failure(
                GctStatus::NullArgument,
                "output pointer is null".into(),
            ));
        }
        let requests = if checks.is_null() {
            Vec::new()
        } else {
            parse_checks(read_str(checks, "checks")?)?
        };
        let mut opts = RunOptions {
            seed,
            ..RunOptions::default()
        };
        if samples > 0 {
            opts.samples = samples as usize;
        }
        let report = run_report(&w.0, &requests, &opts);
        *passed = report.passed;
        *json_out = into_c_string(report.to_json());
        Ok(())
    })
}

fn parse_checks(list: &str) -> Result<Vec<CheckRequest>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            CheckKind::from_name(name)
                .map(CheckRequest::new)
                .ok_or_else(|| {
                    Failure(
                        GctStatus::InvalidArgument,
                        format!("unknown check `{name}`"),
                    )
                })
        })
        .collect()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a workspace. Null is ignored.
///
/// # Safety
/// `w` is null or a workspace returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gct_workspace_free(w: *mut GctWorkspace) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Message for the most recent failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn gct_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
