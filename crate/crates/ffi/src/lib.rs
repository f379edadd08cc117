//! C interface to `roster-core`.
//!
//! Every call returns a [`RosterStatus`]. On anything other than `Ok` or
//! `No`, `roster_last_error` describes the failure until the next call on the
//! same thread. Handles and strings returned by the library are owned by the
//! caller and released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use roster_core::{PeriodicAssignment, RosterError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RosterStatus {
    Ok = 0,
    /// The question was answered in the negative; not an error.
    No = 1,
    InvalidInput = 2,
    Infeasible = 3,
    Precondition = 4,
    Guardrail = 5,
    NullPointer = 6,
    Internal = 7,
}

pub struct RosterInstance(roster_core::Instance);

pub struct RosterPlan(PeriodicAssignment);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(text).expect("nul bytes removed")));
}

fn status_of(err: &RosterError) -> RosterStatus {
    match err {
        RosterError::InvalidInstance(_)
        | RosterError::InvalidPlan(_)
        | RosterError::UnknownTask(_)
        | RosterError::InvalidGraph(_)
        | RosterError::Json(_)
        | RosterError::Io(_) => RosterStatus::InvalidInput,
        RosterError::Infeasible(_) => RosterStatus::Infeasible,
        RosterError::Precondition(_) => RosterStatus::Precondition,
        RosterError::Guardrail(_) => RosterStatus::Guardrail,
    }
}

/// Runs `f`, turning errors and panics into a status and a last-error message.
fn guard(f: impl FnOnce() -> Result<RosterStatus, RosterError>) -> RosterStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(err)) => {
            set_error(err.to_string());
            status_of(&err)
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            set_error(message);
            RosterStatus::Internal
        }
    }
}

fn null_argument() -> RosterError {
    RosterError::Precondition("null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, RosterError> {
    if s.is_null() {
        return Err(null_argument());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| RosterError::InvalidInstance("input is not UTF-8".into()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, RosterError> {
    p.as_ref().ok_or_else(null_argument)
}

fn null_check(ptrs: &[bool]) -> Option<RosterStatus> {
    if ptrs.iter().any(|&null| null) {
        set_error("null pointer argument");
        Some(RosterStatus::NullPointer)
    } else {
        None
    }
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn roster_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates an instance.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roster_instance_from_json(json: *const c_char, out: *mut *mut RosterInstance) -> RosterStatus {
    if let Some(s) = null_check(&[json.is_null(), out.is_null()]) {
        return s;
    }
    *out = ptr::null_mut();
    guard(|| {
        let inst = roster_core::Instance::from_json(read_str(json)?)?;
        inst.ensure_valid()?;
        *out = Box::into_raw(Box::new(RosterInstance(inst)));
        Ok(RosterStatus::Ok)
    })
}

/// # Safety
/// `inst` must come from `roster_instance_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn roster_instance_free(inst: *mut RosterInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn roster_instance_task_count(inst: *const RosterInstance) -> u32 {
    inst.as_ref().map_or(0, |i| i.0.task_count() as u32)
}

/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn roster_instance_workers(inst: *const RosterInstance) -> u32 {
    inst.as_ref().map_or(0, |i| i.0.workers)
}

/// `Ok` if a balanced assignment exists, `No` otherwise. When `certificate`
/// is not NULL it receives the certificate JSON, to be released with
/// `roster_string_free`.
///
/// # Safety
/// `inst` must be a live instance handle; `certificate` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn roster_decide(inst: *const RosterInstance, certificate: *mut *mut c_char) -> RosterStatus {
    if let Some(s) = null_check(&[inst.is_null()]) {
        return s;
    }
    if !certificate.is_null() {
        *certificate = ptr::null_mut();
    }
    guard(|| {
        let decision = roster_core::decide(&deref(inst)?.0)?;
        if !certificate.is_null() {
            *certificate = into_c_string(decision.certificate().to_string());
        }
        Ok(if decision.is_balanced() {
            RosterStatus::Ok
        } else {
            RosterStatus::No
        })
    })
}

/// `Ok` with a balanced plan in `out`, or `No` with `out` set to NULL.
///
/// # Safety
/// `inst` must be a live instance handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roster_solve(inst: *const RosterInstance, out: *mut *mut RosterPlan) -> RosterStatus {
    if let Some(s) = null_check(&[inst.is_null(), out.is_null()]) {
        return s;
    }
    *out = ptr::null_mut();
    guard(|| match roster_core::solve(&deref(inst)?.0)? {
        Some(plan) => {
            *out = Box::into_raw(Box::new(RosterPlan(plan)));
            Ok(RosterStatus::Ok)
        }
        None => Ok(RosterStatus::No),
    })
}

/// `Ok` if any feasible assignment exists, `No` otherwise.
///
/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn roster_feasible(inst: *const RosterInstance) -> RosterStatus {
    if let Some(s) = null_check(&[inst.is_null()]) {
        return s;
    }
    guard(|| {
        Ok(if roster_core::feasible(&deref(inst)?.0)? {
            RosterStatus::Ok
        } else {
            RosterStatus::No
        })
    })
}

/// Smallest worker count admitting a balanced assignment (unrestricted
/// schedules only).
///
/// # Safety
/// `inst` must be a live instance handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roster_min_workers(inst: *const RosterInstance, out: *mut u32) -> RosterStatus {
    if let Some(s) = null_check(&[inst.is_null(), out.is_null()]) {
        return s;
    }
    guard(|| {
        *out = roster_core::min_workers(&deref(inst)?.0)?.workers;
        Ok(RosterStatus::Ok)
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roster_plan_from_json(json: *const c_char, out: *mut *mut RosterPlan) -> RosterStatus {
    if let Some(s) = null_check(&[json.is_null(), out.is_null()]) {
        return s;
    }
    *out = ptr::null_mut();
    guard(|| {
        let plan = PeriodicAssignment::from_json(read_str(json)?)?;
        *out = Box::into_raw(Box::new(RosterPlan(plan)));
        Ok(RosterStatus::Ok)
    })
}

/// # Safety
/// `plan` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn roster_plan_free(plan: *mut RosterPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn roster_plan_period(plan: *const RosterPlan) -> u32 {
    plan.as_ref().map_or(0, |p| p.0.period())
}

/// Worker of task `task` in week `week`, both 1-based; weeks wrap around the
/// period. Returns 0 for an unknown task or week 0.
///
/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn roster_plan_worker(plan: *const RosterPlan, task: u32, week: u32) -> u32 {
    match plan.as_ref() {
        Some(p) if task >= 1 && task as usize <= p.0.task_count() && week >= 1 => p.0.worker(task, week),
        _ => 0,
    }
}

/// # Safety
/// `plan` must be a live plan handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roster_plan_to_json(plan: *const RosterPlan, out: *mut *mut c_char) -> RosterStatus {
    if let Some(s) = null_check(&[plan.is_null(), out.is_null()]) {
        return s;
    }
    *out = ptr::null_mut();
    guard(|| {
        *out = into_c_string(deref(plan)?.0.to_json());
        Ok(RosterStatus::Ok)
    })
}

/// `Ok` if the plan is feasible and balanced, `No` otherwise. Either flag
/// pointer may be NULL.
///
/// # Safety
/// Handles must be live; flag pointers NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn roster_verify(
    inst: *const RosterInstance,
    plan: *const RosterPlan,
    feasible: *mut bool,
    balanced: *mut bool,
) -> RosterStatus {
    if let Some(s) = null_check(&[inst.is_null(), plan.is_null()]) {
        return s;
    }
    guard(|| {
        let (inst, plan) = (&deref(inst)?.0, &deref(plan)?.0);
        let ok_feasible = roster_core::is_feasible(inst, plan)?.is_none();
        let ok_balanced = roster_core::is_balanced(inst, plan);
        if !feasible.is_null() {
            *feasible = ok_feasible;
        }
        if !balanced.is_null() {
            *balanced = ok_balanced;
        }
        Ok(if ok_feasible && ok_balanced {
            RosterStatus::Ok
        } else {
            RosterStatus::No
        })
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn roster_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
