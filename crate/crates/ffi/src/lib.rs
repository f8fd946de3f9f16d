//! C ABI for assembling and solving the plate contact problem.
//!
//! A `PlateProblem` handle owns a run configuration, the assembled reduced
//! system and the latest solution. Every function returns a [`PlateStatus`];
//! on failure the message is available from [`plate_last_error`] on the same
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plate_cdg::cli::system;
use plate_cdg::config::RunConfig;
use plate_cdg::discretization::Discretization;
use plate_cdg::solver::{solve, SolveReport};
use plate_cdg::sparse::CsrMatrix;
use plate_cdg::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlateStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAssembled = 3,
    NotSolved = 4,
    BufferTooSmall = 5,
    SolverFailed = 6,
    Panic = 7,
}

/// Summary of the latest solve.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PlateSolveInfo {
    pub iterations: usize,
    pub objective: f64,
    pub kkt_residual: f64,
    pub rel_change: f64,
    pub converged: bool,
}

struct Assembled {
    d: Discretization,
    a: CsrMatrix,
    b: CsrMatrix,
    f: Vec<f64>,
}

/// Opaque problem handle.
pub struct PlateProblem {
    cfg: RunConfig,
    system: Option<Assembled>,
    solution: Option<(Vec<f64>, SolveReport)>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: PlateStatus, msg: impl Into<String>) -> PlateStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> PlateStatus {
    let status = match e {
        Error::NonFinite(_) | Error::PowerIterationStalled(_) | Error::Factorization(_) => {
            PlateStatus::SolverFailed
        }
        _ => PlateStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> PlateStatus) -> PlateStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == PlateStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(PlateStatus::Panic, "internal panic"),
    }
}

unsafe fn handle<'a>(p: *mut PlateProblem) -> Result<&'a mut PlateProblem, PlateStatus> {
    p.as_mut()
        .ok_or_else(|| fail(PlateStatus::NullPointer, "null problem handle"))
}

fn boxed(cfg: RunConfig, out: *mut *mut PlateProblem) -> PlateStatus {
    let p = Box::new(PlateProblem {
        cfg,
        system: None,
        solution: None,
    });
    // SAFETY: checked non-null by the callers.
    unsafe { *out = Box::into_raw(p) };
    PlateStatus::Ok
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn plate_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a problem with default settings on an `n x n` cell mesh.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_new(n: usize, out: *mut *mut PlateProblem) -> PlateStatus {
    guard(|| {
        if out.is_null() {
            return fail(PlateStatus::NullPointer, "null output pointer");
        }
        let cfg = RunConfig {
            n,
            ..RunConfig::default()
        };
        match cfg.validate() {
            Ok(()) => boxed(cfg, out),
            Err(e) => from_error(e),
        }
    })
}

/// Create a problem from a JSON run configuration (missing fields take
/// their defaults).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer to
/// writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_from_json(
    json: *const c_char,
    out: *mut *mut PlateProblem,
) -> PlateStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(PlateStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(
                PlateStatus::InvalidArgument,
                "configuration is not valid UTF-8",
            );
        };
        match RunConfig::from_json(text) {
            Ok(cfg) => boxed(cfg, out),
            Err(e) => from_error(e),
        }
    })
}

/// Select method `j` (1..=5) and penalty `eta`. Drops any assembled system.
///
/// # Safety
/// `p` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_set_method(
    p: *mut PlateProblem,
    j: u32,
    eta: f64,
) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let mut cfg = p.cfg.clone();
        cfg.method = j as usize;
        cfg.run_eta = eta;
        if let Err(e) = cfg.validate() {
            return from_error(e);
        }
        p.cfg = cfg;
        p.system = None;
        p.solution = None;
        PlateStatus::Ok
    })
}

/// Assemble the reduced stiffness matrix, friction operator and load.
///
/// # Safety
/// `p` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_assemble(p: *mut PlateProblem) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match system(&p.cfg) {
            Ok((d, a, b, f)) => {
                p.system = Some(Assembled { d, a, b, f });
                p.solution = None;
                PlateStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of nodes (length of the nodal solution vector).
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_num_nodes(
    p: *mut PlateProblem,
    out: *mut usize,
) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(PlateStatus::NullPointer, "null output pointer");
        }
        let n = 2 * p.cfg.n + 1;
        *out = n * n;
        PlateStatus::Ok
    })
}

/// Number of unknowns of the reduced system (clamped nodes removed).
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_num_free_dofs(
    p: *mut PlateProblem,
    out: *mut usize,
) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(PlateStatus::NullPointer, "null output pointer");
        }
        match &p.system {
            Some(s) => {
                *out = s.a.nrows();
                PlateStatus::Ok
            }
            None => fail(
                PlateStatus::NotAssembled,
                "call plate_problem_assemble first",
            ),
        }
    })
}

/// Run the solver on the assembled system. A run that stops without
/// meeting the tolerance still stores its iterate and returns
/// `SolverFailed`.
///
/// # Safety
/// `p` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_solve(p: *mut PlateProblem) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let Some(s) = &p.system else {
            return fail(
                PlateStatus::NotAssembled,
                "call plate_problem_assemble first",
            );
        };
        match solve(&s.a, &s.b, &s.f, &p.cfg.solver) {
            Ok(r) => {
                let converged = r.converged;
                p.solution = Some((s.d.space.extend(&r.u), r));
                if converged {
                    PlateStatus::Ok
                } else {
                    fail(
                        PlateStatus::SolverFailed,
                        "iteration limit reached before the tolerance",
                    )
                }
            }
            Err(e) => from_error(e),
        }
    })
}

/// Copy the nodal solution into `buf` (`len` entries, at least the node
/// count). Node order matches [`plate_problem_nodes`].
///
/// # Safety
/// `p` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_solution(
    p: *mut PlateProblem,
    buf: *mut f64,
    len: usize,
) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let Some((u, _)) = &p.solution else {
            return fail(PlateStatus::NotSolved, "call plate_problem_solve first");
        };
        copy_out(u, buf, len)
    })
}

/// Copy node coordinates as interleaved `x, y` pairs into `buf` (`len` at
/// least twice the node count).
///
/// # Safety
/// `p` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_nodes(
    p: *mut PlateProblem,
    buf: *mut f64,
    len: usize,
) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let Some(s) = &p.system else {
            return fail(
                PlateStatus::NotAssembled,
                "call plate_problem_assemble first",
            );
        };
        let xy: Vec<f64> = s.d.space.nodes.iter().flat_map(|q| [q[0], q[1]]).collect();
        copy_out(&xy, buf, len)
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> PlateStatus {
    if buf.is_null() {
        return fail(PlateStatus::NullPointer, "null buffer");
    }
    if len < src.len() {
        return fail(
            PlateStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        );
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    PlateStatus::Ok
}

/// Statistics of the latest solve.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_solve_info(
    p: *mut PlateProblem,
    out: *mut PlateSolveInfo,
) -> PlateStatus {
    guard(|| {
        let p = match handle(p) {
            Ok(p) => p,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(PlateStatus::NullPointer, "null output pointer");
        }
        let Some((_, r)) = &p.solution else {
            return fail(PlateStatus::NotSolved, "call plate_problem_solve first");
        };
        *out = PlateSolveInfo {
            iterations: r.iterations,
            objective: r.objective,
            kkt_residual: r.kkt_residual,
            rel_change: r.rel_change,
            converged: r.converged,
        };
        PlateStatus::Ok
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn plate_problem_free(p: *mut PlateProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
