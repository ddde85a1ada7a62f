//! C ABI over `causaltask`.
//!
//! Scenarios and results are opaque handles created by this library and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`CtStatus`]; on anything but `CT_STATUS_OK` the reason is available
//! from [`ct_last_error_message`] on the same thread. Strings handed out by
//! the library are released with [`ct_string_free`].
//!
//! A result's exit code follows the CLI: 0 success or feasible, 1 failure or
//! infeasible, 3 budget exhausted.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use causaltask::commands::{self, InputError};
use causaltask::demo::DemoParams;
use causaltask::geometry::{classify, CausalClass, Point};
use causaltask::report::{Format, Report};
use causaltask::scenario::{parse_scenario, ScenarioDocument, TaskKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtStatus {
    Ok = 0,
    /// Bad scenario text, pattern, parameters or an unsupported request.
    InputError = 2,
    NullPointer = 4,
    InvalidUtf8 = 5,
    /// A bug inside the library; the handle arguments are left untouched.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtTaskKind {
    Summoning = 0,
    Refined = 1,
    Original = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtCausalClass {
    Coincident = 0,
    Future = 1,
    Past = 2,
    Spacelike = 3,
}

/// A parsed scenario file.
pub struct CtScenario {
    doc: ScenarioDocument,
}

/// A finished report.
pub struct CtResult {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard<F: FnOnce() -> Result<(), (CtStatus, String)>>(f: F) -> CtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CtStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CtStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CtStatus, String)> {
    if p.is_null() {
        return Err((CtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn input_err(e: InputError) -> (CtStatus, String) {
    (CtStatus::InputError, e.0)
}

unsafe fn store_result(
    out: *mut *mut CtResult,
    r: Result<Report, InputError>,
) -> Result<(), (CtStatus, String)> {
    let report = r.map_err(input_err)?;
    *out = Box::into_raw(Box::new(CtResult { report }));
    Ok(())
}

unsafe fn scenario_ref<'a>(s: *const CtScenario) -> Result<&'a CtScenario, (CtStatus, String)> {
    s.as_ref()
        .ok_or((CtStatus::NullPointer, "scenario is null".into()))
}

fn check_out<T>(out: *mut *mut T) -> Result<(), (CtStatus, String)> {
    if out.is_null() {
        Err((CtStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

/// Parses scenario text. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_parse(
    text: *const c_char,
    out: *mut *mut CtScenario,
) -> CtStatus {
    guard(|| {
        check_out(out)?;
        let text = read_str(text, "text")?;
        let doc = parse_scenario(text).map_err(|e| (CtStatus::InputError, e.to_string()))?;
        *out = Box::into_raw(Box::new(CtScenario { doc }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from [`ct_scenario_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_free(scenario: *mut CtScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_kind(
    scenario: *const CtScenario,
    out: *mut CtTaskKind,
) -> CtStatus {
    guard(|| {
        let s = scenario_ref(scenario)?;
        if out.is_null() {
            return Err((CtStatus::NullPointer, "output pointer is null".into()));
        }
        *out = match s.doc.kind() {
            TaskKind::Summoning => CtTaskKind::Summoning,
            TaskKind::Refined => CtTaskKind::Refined,
            TaskKind::Original => CtTaskKind::Original,
        };
        Ok(())
    })
}

/// Canonical text of the scenario; free with [`ct_string_free`].
///
/// # Safety
/// `scenario` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_format(scenario: *const CtScenario) -> *mut c_char {
    match scenario.as_ref() {
        Some(s) => into_c_string(s.doc.to_string()),
        None => ptr::null_mut(),
    }
}

/// Checks the scenario; for summoning tasks also the causal order of its points.
///
/// # Safety
/// `scenario` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ct_validate(
    scenario: *const CtScenario,
    out: *mut *mut CtResult,
) -> CtStatus {
    guard(|| {
        check_out(out)?;
        store_result(out, commands::validate(&scenario_ref(scenario)?.doc))
    })
}

/// Runs the built-in strategy for one pattern. `relay < 0` means `D/2`.
///
/// # Safety
/// `scenario`, `pattern` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ct_run(
    scenario: *const CtScenario,
    pattern: *const c_char,
    relay: i64,
    out: *mut *mut CtResult,
) -> CtStatus {
    guard(|| {
        check_out(out)?;
        let s = scenario_ref(scenario)?;
        let pattern = read_str(pattern, "pattern")?;
        let relay = (relay >= 0).then_some(relay);
        store_result(out, commands::run_pattern(&s.doc, pattern, relay))
    })
}

/// Exhaustive strategy search. `budget_ms == 0` means no budget.
///
/// # Safety
/// `scenario` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ct_search(
    scenario: *const CtScenario,
    workers: u32,
    budget_ms: u64,
    out: *mut *mut CtResult,
) -> CtStatus {
    guard(|| {
        check_out(out)?;
        let s = scenario_ref(scenario)?;
        let budget = (budget_ms > 0).then(|| Duration::from_millis(budget_ms));
        store_result(
            out,
            commands::search(&s.doc, None, budget, workers.max(1) as usize),
        )
    })
}

/// Token feasibility for a summoning scenario.
///
/// # Safety
/// `scenario` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ct_token(
    scenario: *const CtScenario,
    out: *mut *mut CtResult,
) -> CtStatus {
    guard(|| {
        check_out(out)?;
        store_result(out, commands::token(&scenario_ref(scenario)?.doc))
    })
}

/// Runs a built-in demo with its default parameters.
///
/// # Safety
/// `name` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ct_demo(
    name: *const c_char,
    workers: u32,
    out: *mut *mut CtResult,
) -> CtStatus {
    guard(|| {
        check_out(out)?;
        let name = read_str(name, "name")?;
        let params = DemoParams {
            workers: workers.max(1) as usize,
            ..DemoParams::default()
        };
        store_result(out, commands::demo(name, &params))
    })
}

/// 0 success or feasible, 1 failure or infeasible, 3 exhausted; -1 for null.
///
/// # Safety
/// `result` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn ct_result_exit_code(result: *const CtResult) -> i32 {
    result.as_ref().map_or(-1, |r| i32::from(r.report.code))
}

/// Rendered report; `machine != 0` selects the key=value section only.
/// Free with [`ct_string_free`].
///
/// # Safety
/// `result` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn ct_result_render(result: *const CtResult, machine: i32) -> *mut c_char {
    let Some(r) = result.as_ref() else {
        return ptr::null_mut();
    };
    let format = if machine != 0 {
        Format::Machine
    } else {
        Format::Human
    };
    into_c_string(r.report.render(format))
}

/// # Safety
/// `result` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ct_result_free(result: *mut CtResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Causal class of `b` relative to `a`. Both points have `dim` spatial
/// coordinates.
///
/// # Safety
/// `xa` and `xb` must point to `dim` integers each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ct_classify(
    ta: i64,
    xa: *const i64,
    tb: i64,
    xb: *const i64,
    dim: usize,
    out: *mut CtCausalClass,
) -> CtStatus {
    guard(|| {
        if xa.is_null() || xb.is_null() || out.is_null() {
            return Err((
                CtStatus::NullPointer,
                "coordinate or output pointer is null".into(),
            ));
        }
        let a = Point::new(ta, std::slice::from_raw_parts(xa, dim).to_vec());
        let b = Point::new(tb, std::slice::from_raw_parts(xb, dim).to_vec());
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return Err((CtStatus::InputError, e.to_string())),
        };
        let c = classify(&a, &b).map_err(|e| (CtStatus::InputError, e.to_string()))?;
        *out = match c {
            CausalClass::Coincident => CtCausalClass::Coincident,
            CausalClass::CausalFuture => CtCausalClass::Future,
            CausalClass::CausalPast => CtCausalClass::Past,
            CausalClass::Spacelike => CtCausalClass::Spacelike,
        };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. Free with
/// [`ct_string_free`].
#[no_mangle]
pub extern "C" fn ct_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |s| s.clone().into_raw())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}
