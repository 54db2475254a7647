//! C ABI over the neurocsp solver.
//!
//! Objects are opaque handles created by `ncsp_*_new`/`from` functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`NcspStatus`]; on failure `ncsp_last_error_message` describes the cause.
//! Panics are caught at the boundary and reported as `NCSP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ops::ControlFlow;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use neurocsp::compiler::{compile, CompilerParams, Network};
use neurocsp::csp::Csp;
use neurocsp::problems::{parse_dimacs, ProblemSource};
use neurocsp::sampler::{run, RunOutcome, SamplerParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    CompileError = 4,
    InvalidArgument = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// A validated constraint satisfaction problem.
pub struct NcspCsp {
    inner: Csp,
}

/// A network compiled from one `NcspCsp`.
pub struct NcspNetwork {
    inner: Network,
}

/// Outcome of one sampler run.
pub struct NcspRunResult {
    inner: RunOutcome,
    n_vars: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn guard(f: impl FnOnce() -> Result<(), (NcspStatus, String)>) -> NcspStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NcspStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside neurocsp");
            NcspStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, (NcspStatus, String)> {
    if p.is_null() {
        return Err((NcspStatus::NullPointer, "string argument is null".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (NcspStatus::InvalidUtf8, e.to_string()))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, (NcspStatus, String)> {
    p.as_ref().ok_or_else(|| (NcspStatus::NullPointer, format!("{what} is null")))
}

fn out_arg<T>(p: *mut T, what: &str) -> Result<(), (NcspStatus, String)> {
    if p.is_null() {
        Err((NcspStatus::NullPointer, format!("output pointer {what} is null")))
    } else {
        Ok(())
    }
}

/// Message for the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ncsp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a problem from an inline spec (`k3`, `ring:10:antiferro`, ...) or a file path.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_csp_from_spec(spec: *const c_char, out: *mut *mut NcspCsp) -> NcspStatus {
    guard(|| {
        out_arg(out, "out")?;
        let spec = str_arg(spec)?;
        let csp = ProblemSource::parse(spec)
            .and_then(|s| s.load())
            .map_err(|e| (NcspStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(NcspCsp { inner: csp }));
        Ok(())
    })
}

/// Parses DIMACS CNF text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_csp_from_dimacs(text: *const c_char, out: *mut *mut NcspCsp) -> NcspStatus {
    guard(|| {
        out_arg(out, "out")?;
        let csp = parse_dimacs(str_arg(text)?).map_err(|e| (NcspStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(NcspCsp { inner: csp }));
        Ok(())
    })
}

/// # Safety
/// `csp` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_csp_num_vars(csp: *const NcspCsp, out: *mut usize) -> NcspStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ref_arg(csp, "csp")?.inner.num_vars();
        Ok(())
    })
}

/// Checks a complete assignment given as one value index per variable.
///
/// # Safety
/// `values` must point to `len` readable elements; `satisfied` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_csp_check(
    csp: *const NcspCsp,
    values: *const usize,
    len: usize,
    satisfied: *mut bool,
) -> NcspStatus {
    guard(|| {
        out_arg(satisfied, "satisfied")?;
        let csp = &ref_arg(csp, "csp")?.inner;
        if values.is_null() {
            return Err((NcspStatus::NullPointer, "values is null".into()));
        }
        let values = std::slice::from_raw_parts(values, len);
        let a = neurocsp::Assignment::complete(values.to_vec());
        let verdict = csp.check_assignment(&a).map_err(|e| (NcspStatus::InvalidArgument, e.to_string()))?;
        *satisfied = verdict.is_satisfied();
        Ok(())
    })
}

/// # Safety
/// `csp` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ncsp_csp_free(csp: *mut NcspCsp) {
    if !csp.is_null() {
        drop(Box::from_raw(csp));
    }
}

/// Compiles a problem. Non-positive `w_max` or `or_strength` is rejected.
///
/// # Safety
/// `csp` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_network_compile(
    csp: *const NcspCsp,
    w_max: f64,
    bias: f64,
    or_strength: f64,
    heuristic: bool,
    out: *mut *mut NcspNetwork,
) -> NcspStatus {
    guard(|| {
        out_arg(out, "out")?;
        let csp = &ref_arg(csp, "csp")?.inner;
        let params = CompilerParams { w_max, bias_default: bias, or_push_strength: or_strength, heuristic_enabled: heuristic };
        let net = compile(csp, &params).map_err(|e| (NcspStatus::CompileError, e.to_string()))?;
        *out = Box::into_raw(Box::new(NcspNetwork { inner: net }));
        Ok(())
    })
}

/// # Safety
/// `net` must come from this library; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_network_size(
    net: *const NcspNetwork,
    n_principal: *mut usize,
    n_total: *mut usize,
) -> NcspStatus {
    guard(|| {
        out_arg(n_principal, "n_principal")?;
        out_arg(n_total, "n_total")?;
        let net = &ref_arg(net, "net")?.inner;
        *n_principal = net.n_principal();
        *n_total = net.n_neurons();
        Ok(())
    })
}

/// Energy of a binary state (`len` must equal the neuron count; nonzero bytes are active).
///
/// # Safety
/// `x` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_network_energy(
    net: *const NcspNetwork,
    x: *const u8,
    len: usize,
    out: *mut f64,
) -> NcspStatus {
    guard(|| {
        out_arg(out, "out")?;
        let net = &ref_arg(net, "net")?.inner;
        if x.is_null() {
            return Err((NcspStatus::NullPointer, "x is null".into()));
        }
        let state: Vec<bool> = std::slice::from_raw_parts(x, len).iter().map(|&b| b != 0).collect();
        *out = net.energy(&state).map_err(|e| (NcspStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// # Safety
/// `net` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ncsp_network_free(net: *mut NcspNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Runs the sampler. With `stop_at_first` the run ends at the first solution
/// event; otherwise it uses the full `max_sweeps` budget. An unsolved run is
/// not an error.
///
/// # Safety
/// `csp` and `net` must come from this library, `net` compiled from `csp`;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ncsp_run(
    csp: *const NcspCsp,
    net: *const NcspNetwork,
    tau: u32,
    max_sweeps: u64,
    seed: u64,
    stop_at_first: bool,
    out: *mut *mut NcspRunResult,
) -> NcspStatus {
    guard(|| {
        out_arg(out, "out")?;
        let csp = &ref_arg(csp, "csp")?.inner;
        let net = &ref_arg(net, "net")?.inner;
        if net.n_vars() != csp.num_vars() || net.n_principal() != csp.domains().iter().map(|d| d.len()).sum::<usize>() {
            return Err((NcspStatus::InvalidArgument, "network was not compiled from this problem".into()));
        }
        let params = SamplerParams { tau, max_sweeps, seed, ..Default::default() };
        params.validate().map_err(|e| (NcspStatus::InvalidArgument, e))?;
        let outcome = run(net, csp, &params, |_, _| {
            if stop_at_first {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        *out = Box::into_raw(Box::new(NcspRunResult { inner: outcome, n_vars: csp.num_vars() }));
        Ok(())
    })
}

/// # Safety
/// `result` must come from this library; output pointers must be writable.
/// `first_sweep` is set to 0 when unsolved.
#[no_mangle]
pub unsafe extern "C" fn ncsp_run_result_summary(
    result: *const NcspRunResult,
    solved: *mut bool,
    first_sweep: *mut u64,
    n_solutions: *mut usize,
) -> NcspStatus {
    guard(|| {
        out_arg(solved, "solved")?;
        out_arg(first_sweep, "first_sweep")?;
        out_arg(n_solutions, "n_solutions")?;
        let r = &ref_arg(result, "result")?.inner;
        *solved = r.solved();
        *first_sweep = r.first_solution_sweep.unwrap_or(0);
        *n_solutions = r.solutions.len();
        Ok(())
    })
}

/// Copies solution `index` (one value index per variable) into `values`,
/// which must have room for `len >= num_vars` entries.
///
/// # Safety
/// `values` must point to `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn ncsp_run_result_solution(
    result: *const NcspRunResult,
    index: usize,
    values: *mut usize,
    len: usize,
) -> NcspStatus {
    guard(|| {
        out_arg(values, "values")?;
        let r = ref_arg(result, "result")?;
        let sol = r
            .inner
            .solutions
            .get(index)
            .ok_or_else(|| (NcspStatus::OutOfRange, format!("solution {index} of {}", r.inner.solutions.len())))?;
        if len < r.n_vars {
            return Err((NcspStatus::OutOfRange, format!("buffer holds {len} values, need {}", r.n_vars)));
        }
        ptr::copy_nonoverlapping(sol.values.as_ptr(), values, r.n_vars);
        Ok(())
    })
}

/// # Safety
/// `result` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ncsp_run_result_free(result: *mut NcspRunResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
