//! C ABI for `dsubspace`.
//!
//! Objects cross the boundary as opaque pointers created by `*_new` style
//! functions and released with the matching `*_free`. Fallible calls return a
//! [`DsStatus`]; on failure [`ds_last_error_message`] describes what went wrong
//! on the calling thread. Panics are caught and reported as
//! `DS_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DVector;

use dsubspace::record::Termination;
use dsubspace::solver;
use dsubspace::{problems, Error, Problem, RngStream, RunRecord, SolverConfig, StreamId};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    InvalidArgument = 1,
    UnknownKey = 2,
    Parse = 3,
    Io = 4,
    NullPointer = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsTermination {
    StepSizeFloor = 0,
    Budget = 1,
    MaxIterations = 2,
}

/// Solver settings.
pub struct DsConfig(SolverConfig);

/// An objective with its starting point.
pub struct DsProblem(Problem);

/// Result of one run.
pub struct DsRecord(RunRecord);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(err: Error) -> DsStatus {
    let status = match &err {
        Error::InvalidArgument(_) | Error::UnsupportedFamily(_) => DsStatus::InvalidArgument,
        Error::UnknownKey { .. } => DsStatus::UnknownKey,
        Error::Parse(_) => DsStatus::Parse,
        Error::Io(_) => DsStatus::Io,
    };
    set_error(err.to_string());
    status
}

fn null(what: &str) -> DsStatus {
    set_error(format!("{what} is null"));
    DsStatus::NullPointer
}

/// Runs `f`, turning panics into `DS_STATUS_INTERNAL`.
fn guard(f: impl FnOnce() -> DsStatus) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_owned());
            set_error(format!("internal error: {msg}"));
            DsStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, DsStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        DsStatus::InvalidArgument
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration with default settings. Free with [`ds_config_free`].
#[no_mangle]
pub extern "C" fn ds_config_new() -> *mut DsConfig {
    Box::into_raw(Box::new(DsConfig(SolverConfig::default())))
}

/// # Safety
/// `config` must come from [`ds_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ds_config_free(config: *mut DsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets an option by name, e.g. `("sketch", "gaussian:r=1")`, `("budget",
/// "5050")`. Names match the command-line flags of the `solve` command.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn ds_config_set(config: *mut DsConfig, key: *const c_char, value: *const c_char) -> DsStatus {
    guard(|| {
        let Some(cfg) = config.as_mut() else { return null("config") };
        let key = match str_arg(key, "key") {
            Ok(k) => k,
            Err(s) => return s,
        };
        let value = match str_arg(value, "value") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match cfg.0.set_option(key, value) {
            Ok(()) => DsStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Builds a registered problem such as `"quad:n=100,cond=1e4"`. `seed` keys
/// random instance data.
///
/// # Safety
/// `key` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_problem_from_key(key: *const c_char, seed: u64, out: *mut *mut DsProblem) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let key = match str_arg(key, "key") {
            Ok(k) => k,
            Err(s) => return s,
        };
        match problems::build(key, seed) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(DsProblem(p)));
                DsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

struct Callback {
    f: extern "C" fn(*mut c_void, *const f64, usize) -> f64,
    user_data: *mut c_void,
}

// The caller promises the callback may be invoked from any thread.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    fn call(&self, x: &[f64]) -> f64 {
        (self.f)(self.user_data, x.as_ptr(), x.len())
    }
}

/// Wraps a C objective `f(user_data, x, n)`. `x0` is copied. The callback and `user_data` must
/// stay valid for the problem's lifetime and must be safe to call from the
/// thread running the solver.
///
/// # Safety
/// `x0` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_problem_from_callback(
    name: *const c_char,
    n: usize,
    x0: *const f64,
    objective: Option<extern "C" fn(user_data: *mut c_void, x: *const f64, n: usize) -> f64>,
    user_data: *mut c_void,
    out: *mut *mut DsProblem,
) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if x0.is_null() {
            return null("x0");
        }
        let Some(f) = objective else { return null("objective") };
        if n == 0 {
            return fail(Error::InvalidArgument("dimension must be positive".into()));
        }
        let name = if name.is_null() {
            "callback"
        } else {
            match str_arg(name, "name") {
                Ok(s) => s,
                Err(s) => return s,
            }
        };
        let start = DVector::from_column_slice(std::slice::from_raw_parts(x0, n));
        let cb = Callback { f, user_data };
        let problem = Problem::new(name, start, move |x| cb.call(x));
        *out = Box::into_raw(Box::new(DsProblem(problem)));
        DsStatus::Ok
    })
}

/// # Safety
/// `problem` must come from a `ds_problem_*` constructor and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn ds_problem_free(problem: *mut DsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Dimension of the problem, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_problem_dim(problem: *const DsProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.dim())
}

/// Evaluates the objective at `x` (length `n`) without counting.
///
/// # Safety
/// `problem` must be live, `x` must point to `n` doubles, `value` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_problem_eval(problem: *const DsProblem, x: *const f64, n: usize, value: *mut f64) -> DsStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else { return null("problem") };
        if x.is_null() {
            return null("x");
        }
        if value.is_null() {
            return null("value");
        }
        if n != p.0.dim() {
            return fail(Error::InvalidArgument(format!("expected {} entries, got {n}", p.0.dim())));
        }
        *value = p.0.value(std::slice::from_raw_parts(x, n));
        DsStatus::Ok
    })
}

/// Runs the configured solver. Random draws come from a stream keyed by
/// `seed` and the problem name, as in the command-line tool.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_solve(
    problem: *const DsProblem,
    config: *const DsConfig,
    seed: u64,
    out: *mut *mut DsRecord,
) -> DsStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else { return null("problem") };
        let Some(cfg) = config.as_ref() else { return null("config") };
        if out.is_null() {
            return null("out");
        }
        let mut rng = RngStream::new(seed, StreamId::new(p.0.name(), cfg.0.label(), 0));
        match solver::run(&p.0, &cfg.0, &mut rng) {
            Ok(rec) => {
                *out = Box::into_raw(Box::new(DsRecord(rec)));
                DsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `record` must come from [`ds_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ds_record_free(record: *mut DsRecord) {
    if !record.is_null() {
        drop(Box::from_raw(record));
    }
}

/// Final objective value, NaN for a null handle.
///
/// # Safety
/// `record` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn ds_record_final_f(record: *const DsRecord) -> f64 {
    record.as_ref().map_or(f64::NAN, |r| r.0.final_f)
}

/// # Safety
/// `record` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn ds_record_total_evals(record: *const DsRecord) -> u64 {
    record.as_ref().map_or(0, |r| r.0.total_evals())
}

/// Number of history rows (iterations + 1).
///
/// # Safety
/// `record` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn ds_record_history_len(record: *const DsRecord) -> usize {
    record.as_ref().map_or(0, |r| r.0.history.len())
}

/// Copies history row `i`. Any output pointer may be null.
///
/// # Safety
/// `record` must be live; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_record_history_row(
    record: *const DsRecord,
    i: usize,
    k: *mut u64,
    alpha: *mut f64,
    f: *mut f64,
    evals: *mut u64,
) -> DsStatus {
    guard(|| {
        let Some(r) = record.as_ref() else { return null("record") };
        let Some(row) = r.0.history.get(i) else {
            return fail(Error::InvalidArgument(format!("row {i} out of range")));
        };
        if !k.is_null() {
            *k = row.k;
        }
        if !alpha.is_null() {
            *alpha = row.alpha;
        }
        if !f.is_null() {
            *f = row.f;
        }
        if !evals.is_null() {
            *evals = row.evals;
        }
        DsStatus::Ok
    })
}

/// Copies the final point into `x`, which must hold `n` = dimension doubles.
///
/// # Safety
/// `record` must be live; `x` must point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_record_final_x(record: *const DsRecord, x: *mut f64, n: usize) -> DsStatus {
    guard(|| {
        let Some(r) = record.as_ref() else { return null("record") };
        if x.is_null() {
            return null("x");
        }
        let src = r.0.final_x.as_slice();
        if n != src.len() {
            return fail(Error::InvalidArgument(format!("expected {} entries, got {n}", src.len())));
        }
        std::slice::from_raw_parts_mut(x, n).copy_from_slice(src);
        DsStatus::Ok
    })
}

/// # Safety
/// `record` and `out` must be live/writable.
#[no_mangle]
pub unsafe extern "C" fn ds_record_termination(record: *const DsRecord, out: *mut DsTermination) -> DsStatus {
    guard(|| {
        let Some(r) = record.as_ref() else { return null("record") };
        if out.is_null() {
            return null("out");
        }
        *out = match r.0.termination {
            Termination::StepSizeFloor => DsTermination::StepSizeFloor,
            Termination::Budget => DsTermination::Budget,
            Termination::MaxIterations => DsTermination::MaxIterations,
        };
        DsStatus::Ok
    })
}

/// `μ = log_{γ_inc}(1/γ_dec)` and `p₀ = max(1/(1+μ), μ/(1+μ))`.
///
/// # Safety
/// `mu` and `p0` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_diagnostics_mu_p0(gamma_inc: f64, gamma_dec: f64, mu: *mut f64, p0: *mut f64) -> DsStatus {
    guard(|| {
        if mu.is_null() || p0.is_null() {
            return null("output");
        }
        match solver::diagnostics_mu_p0(gamma_inc, gamma_dec) {
            Ok((m, p)) => {
                *mu = m;
                *p0 = p;
                DsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
