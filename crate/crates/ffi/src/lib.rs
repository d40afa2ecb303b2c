//! C ABI over the telephone-broadcast toolkit.
//!
//! Instances and protocols cross the boundary as opaque heap handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`TbStatus`]; on failure a human-readable message is kept
//! per thread and can be read with [`tb_last_error_message`].
//!
//! Strings passed in must be NUL-terminated UTF-8. Strings handed out are
//! owned by the caller and released with [`tb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use telephone_broadcast::graph::Instance;
use telephone_broadcast::io;
use telephone_broadcast::protocol::{simulate, verify, Protocol};
use telephone_broadcast::reduction_sat::build_sat_gadget;
use telephone_broadcast::sat::{normalize, parse_dimacs, validate_33};
use telephone_broadcast::solvers::{decide, exact_search, Answer};

/// Result codes. Zero means success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidProtocol = 4,
    SolveError = 5,
    ReductionError = 6,
    Panic = 7,
}

/// A broadcast instance: graph, source and deadline.
pub struct TbInstance(Instance);

/// A broadcast protocol for some instance.
pub struct TbProtocol(Protocol);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

type FfiResult = Result<(), (TbStatus, String)>;

fn guard(f: impl FnOnce() -> FfiResult) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TbStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (TbStatus, String)> {
    if s.is_null() {
        return Err((TbStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (TbStatus::InvalidUtf8, e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TbStatus, String)> {
    p.as_ref().ok_or_else(|| (TbStatus::NullPointer, format!("null {what}")))
}

fn out_ptr<T>(p: *mut T) -> Result<(), (TbStatus, String)> {
    if p.is_null() {
        Err((TbStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn tb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance in the `tb n m s t` text format.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_parse(src: *const c_char, out: *mut *mut TbInstance) -> TbStatus {
    guard(|| {
        out_ptr(out)?;
        let inst = io::parse_instance(text(src)?).map_err(|e| (TbStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(TbInstance(inst)));
        Ok(())
    })
}

/// Renders an instance back to text. Returns NULL on a NULL handle.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_render(inst: *const TbInstance) -> *mut c_char {
    match inst.as_ref() {
        Some(i) => to_c_string(io::render_instance(&i.0)),
        None => ptr::null_mut(),
    }
}

/// Vertex count, or 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_order(inst: *const TbInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.order())
}

/// Source vertex (1-based), or 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_source(inst: *const TbInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.source())
}

/// Deadline, or 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_deadline(inst: *const TbInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.deadline())
}

/// # Safety
/// `inst` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_free(inst: *mut TbInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Parses a protocol (child lists) for `inst`.
///
/// # Safety
/// `src` must be a NUL-terminated string, `inst` a live handle and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tb_protocol_parse(
    inst: *const TbInstance,
    src: *const c_char,
    out: *mut *mut TbProtocol,
) -> TbStatus {
    guard(|| {
        out_ptr(out)?;
        let inst = &deref(inst, "instance")?.0;
        let p = io::parse_protocol(text(src)?, inst.order(), inst.source())
            .map_err(|e| (TbStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(TbProtocol(p)));
        Ok(())
    })
}

/// Renders a protocol to text. Returns NULL on a NULL handle.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_protocol_render(p: *const TbProtocol) -> *mut c_char {
    match p.as_ref() {
        Some(p) => to_c_string(io::render_protocol(&p.0)),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `p` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_protocol_free(p: *mut TbProtocol) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Checks `p` against `inst`. A protocol that runs but misses the deadline
/// yields `TB_OK` with `*valid == false`; one that is not a spanning tree
/// of the graph yields `InvalidProtocol`. `completion` may be NULL.
///
/// # Safety
/// Handles must be live; `valid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_verify(
    inst: *const TbInstance,
    p: *const TbProtocol,
    valid: *mut bool,
    completion: *mut usize,
) -> TbStatus {
    guard(|| {
        out_ptr(valid)?;
        let inst = &deref(inst, "instance")?.0;
        let p = &deref(p, "protocol")?.0;
        let tl = simulate(inst, p).map_err(|e| (TbStatus::InvalidProtocol, e.to_string()))?;
        *valid = verify(inst, p).is_valid();
        if !completion.is_null() {
            *completion = tl.completion();
        }
        Ok(())
    })
}

/// Decides whether `inst` can be broadcast within its deadline. On YES and
/// a non-NULL `protocol`, a verifying protocol handle is stored there;
/// otherwise `*protocol` is set to NULL.
///
/// # Safety
/// `inst` must be live; `yes` writable; `protocol` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tb_decide(
    inst: *const TbInstance,
    budget: u64,
    yes: *mut bool,
    protocol: *mut *mut TbProtocol,
) -> TbStatus {
    guard(|| {
        out_ptr(yes)?;
        let inst = &deref(inst, "instance")?.0;
        let d = decide(inst, budget).map_err(|e| (TbStatus::SolveError, e.to_string()))?;
        let witness = match d.answer {
            Answer::Yes(p) => {
                *yes = true;
                Some(p)
            }
            Answer::No => {
                *yes = false;
                None
            }
        };
        if !protocol.is_null() {
            *protocol = witness.map_or(ptr::null_mut(), |p| Box::into_raw(Box::new(TbProtocol(p))));
        }
        Ok(())
    })
}

/// Minimum broadcast time of `inst` (its deadline is ignored). `protocol`
/// may be NULL; otherwise an optimal protocol handle is stored there.
///
/// # Safety
/// `inst` must be live; `time` writable; `protocol` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tb_solve(
    inst: *const TbInstance,
    budget: u64,
    time: *mut usize,
    protocol: *mut *mut TbProtocol,
) -> TbStatus {
    guard(|| {
        out_ptr(time)?;
        let inst = &deref(inst, "instance")?.0;
        let r = exact_search(inst, budget).map_err(|e| (TbStatus::SolveError, e.to_string()))?;
        *time = r.broadcast_time;
        if !protocol.is_null() {
            *protocol = Box::into_raw(Box::new(TbProtocol(r.witness)));
        }
        Ok(())
    })
}

/// Builds the broadcast instance encoding a DIMACS CNF formula. Formulas
/// that do not already fit the gadget are normalized first when
/// `normalize_input` is true and rejected otherwise.
///
/// # Safety
/// `dimacs` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_reduce_sat(
    dimacs: *const c_char,
    normalize_input: bool,
    out: *mut *mut TbInstance,
) -> TbStatus {
    guard(|| {
        out_ptr(out)?;
        let mut f = parse_dimacs(text(dimacs)?).map_err(|e| (TbStatus::ParseError, e.to_string()))?;
        if !validate_33(&f).is_empty() || f.has_empty_clause() {
            if !normalize_input {
                return Err((TbStatus::ReductionError, "formula does not fit the gadget".into()));
            }
            f = normalize(&f)
                .map_err(|e| (TbStatus::ReductionError, e.to_string()))?
                .formula;
        }
        let g = build_sat_gadget(&f).map_err(|e| (TbStatus::ReductionError, e.to_string()))?;
        *out = Box::into_raw(Box::new(TbInstance(g.instance)));
        Ok(())
    })
}
