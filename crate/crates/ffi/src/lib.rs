//! C ABI for the jprocrustes solvers.
//!
//! Problems and solutions are opaque handles owned by the caller and freed
//! with [`jp_problem_free`] and [`jp_solution_free`]. Matrices cross the
//! boundary as row-major arrays of [`JpComplex`]. Every entry point returns
//! a [`JpStatus`]; on failure [`jp_last_error_message`] describes the error
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jprocrustes::cli;
use jprocrustes::matcore::{c64, diag, ComplexMatrix, Tolerance};
use jprocrustes::{Error, ProblemInstance, SolveOutcome, StructureMode};

/// A complex number as two doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JpComplex {
    pub re: f64,
    pub im: f64,
}

/// Result of every call. The numeric values match the CLI exit codes where
/// the two overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JpStatus {
    Ok = 0,
    InvalidInput = 1,
    Infeasible = 2,
    Numerical = 3,
    NullPointer = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Structure class of the sought matrix.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JpMode {
    Hamiltonian = 0,
    SkewHamiltonian = 1,
    Symplectic = 2,
}

fn mode_from_raw(raw: u32) -> Option<StructureMode> {
    match raw {
        x if x == JpMode::Hamiltonian as u32 => Some(StructureMode::Hamiltonian),
        x if x == JpMode::SkewHamiltonian as u32 => Some(StructureMode::SkewHamiltonian),
        x if x == JpMode::Symplectic as u32 => Some(StructureMode::Symplectic),
        _ => None,
    }
}

/// A validated problem instance.
pub struct JpProblem(ProblemInstance);

/// The outcome of a solve: a solution or an infeasibility report.
pub struct JpSolution {
    outcome: SolveOutcome,
    report: CString,
    n: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("interior NULs removed"));
}

fn status_for(e: &Error) -> JpStatus {
    match e {
        Error::Numerical(_) => JpStatus::Numerical,
        _ => JpStatus::InvalidInput,
    }
}

fn fail(e: Error) -> JpStatus {
    let status = status_for(&e);
    set_error(e.to_string());
    status
}

// Runs `f`, turning a panic into `JpStatus::Panic`.
fn guarded(f: impl FnOnce() -> JpStatus) -> JpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == JpStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            JpStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("`", stringify!($p), "` is NULL"));
            return JpStatus::NullPointer;
        })+
    };
}

unsafe fn read_matrix(data: *const JpComplex, rows: usize, cols: usize) -> ComplexMatrix {
    let s = std::slice::from_raw_parts(data, rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let z = s[i * cols + j];
        c64(z.re, z.im)
    })
}

/// Builds a problem from row-major matrices.
///
/// `mode` is a `JpMode` value. `j` and `a_tilde` are `n x n`, `x` is
/// `n x m` and `d_diag` holds the `m` diagonal entries of D. Default
/// tolerances apply.
///
/// # Safety
/// Each pointer must reference an array of the stated length and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn jp_problem_new(
    mode: u32,
    n: usize,
    m: usize,
    j: *const JpComplex,
    x: *const JpComplex,
    d_diag: *const JpComplex,
    a_tilde: *const JpComplex,
    out: *mut *mut JpProblem,
) -> JpStatus {
    non_null!(j, x, d_diag, a_tilde, out);
    guarded(|| {
        *out = ptr::null_mut();
        let Some(mode) = mode_from_raw(mode) else {
            set_error(format!("unknown mode {mode}"));
            return JpStatus::InvalidInput;
        };
        let d: Vec<_> = std::slice::from_raw_parts(d_diag, m)
            .iter()
            .map(|z| c64(z.re, z.im))
            .collect();
        let inst = ProblemInstance::new(
            mode,
            read_matrix(j, n, n),
            read_matrix(x, n, m),
            diag(&d),
            read_matrix(a_tilde, n, n),
            Tolerance::default(),
        );
        match inst {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(JpProblem(inst)));
                JpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses a problem document (the CLI input format).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jp_problem_from_json(json: *const c_char, out: *mut *mut JpProblem) -> JpStatus {
    non_null!(json, out);
    guarded(|| {
        *out = ptr::null_mut();
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => {
                set_error(format!("document is not UTF-8: {e}"));
                return JpStatus::InvalidInput;
            }
        };
        match cli::parse_instance_str(text) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(JpProblem(inst)));
                JpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Replaces the problem's tolerances.
///
/// # Safety
/// `problem` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn jp_problem_set_tolerance(
    problem: *mut JpProblem,
    rank_cutoff: f64,
    structure_atol: f64,
) -> JpStatus {
    non_null!(problem);
    guarded(|| match Tolerance::new(rank_cutoff, structure_atol) {
        Ok(tol) => {
            (*problem).0.tol = tol;
            JpStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Requests an optimality audit with `samples` oracle draws when solving.
///
/// # Safety
/// `problem` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn jp_problem_set_audit(problem: *mut JpProblem, samples: usize, seed: u64) -> JpStatus {
    non_null!(problem);
    guarded(|| {
        let inst = &mut (*problem).0;
        inst.audit_samples = Some(samples);
        inst.seed = Some(seed);
        JpStatus::Ok
    })
}

/// # Safety
/// `problem` must be NULL or come from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn jp_problem_free(problem: *mut JpProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Solves the problem. Returns `Ok` with a solution or `Infeasible` with a
/// report; in both cases `*out` receives a handle.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jp_solve(problem: *const JpProblem, out: *mut *mut JpSolution) -> JpStatus {
    non_null!(problem, out);
    guarded(|| {
        *out = ptr::null_mut();
        let inst = &(*problem).0;
        let solved = inst.structure().and_then(|js| {
            let outcome = inst.solve_with(&js)?;
            let report = cli::build_report(inst, &js, &outcome)?;
            Ok((outcome, report))
        });
        match solved {
            Ok((outcome, report)) => {
                let status = match outcome {
                    SolveOutcome::Solution(_) => JpStatus::Ok,
                    SolveOutcome::Infeasible { failed_step, .. } => {
                        set_error(format!("infeasible at step {failed_step}"));
                        JpStatus::Infeasible
                    }
                };
                let text = CString::new(cli::format_document(&report)).expect("JSON has no NULs");
                *out = Box::into_raw(Box::new(JpSolution {
                    outcome,
                    report: text,
                    n: inst.n(),
                }));
                status
            }
            Err(e) => fail(e),
        }
    })
}

/// Order n of the solution matrix; 0 when infeasible or `solution` is NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jp_solution_dim(solution: *const JpSolution) -> usize {
    match solution.as_ref() {
        Some(s) if s.outcome.solution().is_some() => s.n,
        _ => 0,
    }
}

/// Copies the optimal matrix, row-major, into `buf` (at least n*n entries).
///
/// # Safety
/// `solution` must be a live handle and `buf` must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn jp_solution_a_hat(solution: *const JpSolution, buf: *mut JpComplex, len: usize) -> JpStatus {
    non_null!(solution, buf);
    guarded(|| {
        let Some(sol) = (*solution).outcome.solution() else {
            set_error("the problem is infeasible; there is no solution matrix");
            return JpStatus::Infeasible;
        };
        let (rows, cols) = sol.a_hat.shape();
        if len < rows * cols {
            set_error(format!("buffer holds {len} entries, {} needed", rows * cols));
            return JpStatus::BufferTooSmall;
        }
        let dst = std::slice::from_raw_parts_mut(buf, rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = sol.a_hat[(i, j)];
                dst[i * cols + j] = JpComplex { re: z.re, im: z.im };
            }
        }
        JpStatus::Ok
    })
}

/// Writes `||At - A_hat||_F`.
///
/// # Safety
/// `solution` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jp_solution_residual(solution: *const JpSolution, out: *mut f64) -> JpStatus {
    non_null!(solution, out);
    guarded(|| match (*solution).outcome.solution() {
        Some(sol) => {
            *out = sol.residual;
            JpStatus::Ok
        }
        None => {
            set_error("the problem is infeasible; there is no residual");
            JpStatus::Infeasible
        }
    })
}

/// Step number at which feasibility failed, or 0 for a solution.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jp_solution_failed_step(solution: *const JpSolution) -> u32 {
    solution
        .as_ref()
        .and_then(|s| s.outcome.failed_step())
        .and_then(|step| step.parse().ok())
        .unwrap_or(0)
}

/// The full report document as JSON. Release it with [`jp_string_free`].
/// Returns NULL if `solution` is NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jp_solution_report_json(solution: *const JpSolution) -> *mut c_char {
    match solution.as_ref() {
        Some(s) => s.report.clone().into_raw(),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `solution` must be NULL or come from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn jp_solution_free(solution: *mut JpSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed at most
/// once.
#[no_mangle]
pub unsafe extern "C" fn jp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; empty after a
/// successful one. Valid until the next call into the library from the
/// same thread.
#[no_mangle]
pub extern "C" fn jp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
