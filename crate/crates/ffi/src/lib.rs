//! C ABI for `seqmeas`.
//!
//! Scenarios cross the boundary as opaque `SmScenario` handles created by
//! `sm_scenario_from_json` or `sm_scenario_construction` and released with
//! `sm_scenario_free`. Every fallible call returns an [`SmStatus`]; the
//! message for the last failure on the calling thread is available from
//! `sm_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use seqmeas::cli::document::{parse_scenario_document, ScenarioDocument};
use seqmeas::constructions::{dual_basis_witness_value, paper_scenario, Construction};
use seqmeas::correlations::{analyze, sequential_joint, single_time};
use seqmeas::optimize::{maximize, Mode, OptConfig};
use seqmeas::quantum::Scenario;
use seqmeas::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Dimension = 5,
    BufferTooSmall = 6,
    Numerical = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmConstruction {
    Trine = 0,
    DualBasis = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmMode {
    Full = 0,
    FixedState = 1,
    FixedAlice = 2,
    ProjectiveAlice = 3,
}

/// Opaque scenario handle.
pub struct SmScenario {
    inner: Scenario,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmShape {
    pub alice_dim: usize,
    pub bob_dim: usize,
    pub n_alice: usize,
    pub n_bob: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SmWitness {
    pub value: f64,
    pub nsit_residual: f64,
}

/// Optimizer settings. `fixed` may be NULL unless `mode` is one of the
/// fixed modes; `threads == 0` uses every core.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SmOptConfig {
    pub alice_dim: usize,
    pub bob_dim: usize,
    pub n_alice_outcomes: usize,
    pub n_bob_outcomes: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol: f64,
    pub mode: SmMode,
    pub fixed: *const SmScenario,
    pub threads: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(message).unwrap_or_default());
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::Dimension(_) | Error::Shape(_) | Error::ParamCount { .. } => SmStatus::Dimension,
        Error::Convergence { .. } | Error::Singular { .. } | Error::Degenerate(_) => SmStatus::Numerical,
        _ => SmStatus::Validation,
    }
}

fn fail(status: SmStatus, message: impl Into<String>) -> SmStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> SmStatus) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(SmStatus::Panic, "internal panic"),
    }
}

fn into_handle(s: Scenario) -> *mut SmScenario {
    Box::into_raw(Box::new(SmScenario { inner: s }))
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses and validates a JSON scenario document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_from_json(json: *const c_char, tol: f64, out: *mut *mut SmScenario) -> SmStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(SmStatus::NullPointer, "null argument");
        }
        // SAFETY: caller guarantees a valid NUL-terminated string.
        let Ok(text) = unsafe { CStr::from_ptr(json) }.to_str() else {
            return fail(SmStatus::InvalidUtf8, "document is not UTF-8");
        };
        let doc = match parse_scenario_document(text) {
            Ok(doc) => doc,
            Err(e) => return fail(SmStatus::Parse, e),
        };
        match doc.to_scenario(tol) {
            Ok(s) => {
                // SAFETY: `out` checked non-null above.
                unsafe { *out = into_handle(s) };
                SmStatus::Ok
            }
            Err(e) => fail(SmStatus::Validation, e),
        }
    })
}

/// Builds one of the explicit violating scenarios.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_construction(
    kind: SmConstruction,
    d: usize,
    out: *mut *mut SmScenario,
) -> SmStatus {
    guard(|| {
        if out.is_null() {
            return fail(SmStatus::NullPointer, "null argument");
        }
        let kind = match kind {
            SmConstruction::Trine => Construction::Trine,
            SmConstruction::DualBasis => Construction::DualBasis,
        };
        match paper_scenario(kind, d) {
            Ok(s) => {
                // SAFETY: `out` checked non-null above.
                unsafe { *out = into_handle(s) };
                SmStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Releases a scenario handle. NULL is ignored.
///
/// # Safety
/// `scenario` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_free(scenario: *mut SmScenario) {
    if !scenario.is_null() {
        // SAFETY: caller guarantees the pointer came from `into_handle`.
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Serializes a scenario to a JSON document; free it with `sm_string_free`.
///
/// # Safety
/// `scenario` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_to_json(scenario: *const SmScenario, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(SmStatus::NullPointer, "null argument");
        }
        // SAFETY: checked non-null; caller guarantees liveness.
        let s = unsafe { &(*scenario).inner };
        let text = serde_json::to_string(&ScenarioDocument::from_scenario(s)).expect("documents serialize");
        let c = CString::new(text).expect("JSON has no interior NUL");
        // SAFETY: checked non-null.
        unsafe { *out = c.into_raw() };
        SmStatus::Ok
    })
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from `sm_scenario_to_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: caller guarantees the pointer came from `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `scenario` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_scenario_shape(scenario: *const SmScenario, out: *mut SmShape) -> SmStatus {
    if scenario.is_null() || out.is_null() {
        return fail(SmStatus::NullPointer, "null argument");
    }
    // SAFETY: checked non-null; caller guarantees liveness.
    let s = unsafe { &(*scenario).inner };
    // SAFETY: checked non-null.
    unsafe {
        *out = SmShape {
            alice_dim: s.alice_dim(),
            bob_dim: s.bob_dim(),
            n_alice: s.n_alice(),
            n_bob: s.n_bob(),
        }
    };
    SmStatus::Ok
}

/// Witness value and NSIT residual.
///
/// # Safety
/// `scenario` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_witness(scenario: *const SmScenario, out: *mut SmWitness) -> SmStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(SmStatus::NullPointer, "null argument");
        }
        // SAFETY: checked non-null; caller guarantees liveness.
        let s = unsafe { &(*scenario).inner };
        match analyze(s) {
            Ok(a) => {
                // SAFETY: checked non-null.
                unsafe {
                    *out = SmWitness {
                        value: a.report.value,
                        nsit_residual: a.report.nsit_residual,
                    }
                };
                SmStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Copies `values` into `buf`, reporting the required length in `written`.
unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize, written: *mut usize) -> SmStatus {
    if !written.is_null() {
        // SAFETY: checked non-null.
        unsafe { *written = values.len() };
    }
    if len < values.len() {
        return fail(
            SmStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} required", values.len()),
        );
    }
    if buf.is_null() {
        return fail(SmStatus::NullPointer, "null buffer");
    }
    // SAFETY: caller guarantees `buf` has room for `len >= values.len()` doubles.
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
    SmStatus::Ok
}

fn table_call(
    scenario: *const SmScenario,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
    which: fn(&Scenario) -> seqmeas::Result<Vec<f64>>,
) -> SmStatus {
    guard(|| {
        if scenario.is_null() {
            return fail(SmStatus::NullPointer, "null scenario");
        }
        // SAFETY: checked non-null; caller guarantees liveness.
        let s = unsafe { &(*scenario).inner };
        match which(s) {
            // SAFETY: forwarded caller contract.
            Ok(values) => unsafe { copy_out(&values, buf, len, written) },
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// `p(a0, a1, b)` row-major over `(a0, a1, b)`; needs `n_alice² · n_bob` doubles.
///
/// # Safety
/// `scenario` must be a live handle; `buf` must hold `len` doubles;
/// `written` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sm_joint_table(
    scenario: *const SmScenario,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> SmStatus {
    table_call(scenario, buf, len, written, |s| {
        Ok(sequential_joint(s)?.values().to_vec())
    })
}

/// `p(a1, b)` row-major over `(a1, b)`; needs `n_alice · n_bob` doubles.
///
/// # Safety
/// Same contract as `sm_joint_table`.
#[no_mangle]
pub unsafe extern "C" fn sm_single_table(
    scenario: *const SmScenario,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> SmStatus {
    table_call(scenario, buf, len, written, |s| Ok(single_time(s)?.values().to_vec()))
}

/// Residuals `Σ_a0 p(a0, a1, b) − p(a1, b)` row-major over `(a1, b)`.
///
/// # Safety
/// Same contract as `sm_joint_table`.
#[no_mangle]
pub unsafe extern "C" fn sm_residuals(
    scenario: *const SmScenario,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> SmStatus {
    table_call(scenario, buf, len, written, |s| {
        Ok(analyze(s)?.report.residuals.values().to_vec())
    })
}

/// `½(1 − 1/d)`.
#[no_mangle]
pub extern "C" fn sm_dual_basis_witness_value(d: usize) -> f64 {
    dual_basis_witness_value(d)
}

/// Optimizer defaults for the given shape.
#[no_mangle]
pub extern "C" fn sm_opt_config_default(
    alice_dim: usize,
    bob_dim: usize,
    n_alice_outcomes: usize,
    n_bob_outcomes: usize,
) -> SmOptConfig {
    let cfg = OptConfig::new(alice_dim, bob_dim, n_alice_outcomes, n_bob_outcomes);
    SmOptConfig {
        alice_dim,
        bob_dim,
        n_alice_outcomes,
        n_bob_outcomes,
        restarts: cfg.restarts,
        max_iters: cfg.max_iters,
        seed: cfg.seed,
        tol: cfg.tol,
        mode: SmMode::Full,
        fixed: ptr::null(),
        threads: 0,
    }
}

/// Maximizes the witness; the best scenario is returned as a new handle.
///
/// # Safety
/// `config` must be readable, `config->fixed` NULL or a live handle, and
/// `best_value`, `best` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_optimize(
    config: *const SmOptConfig,
    best_value: *mut f64,
    best: *mut *mut SmScenario,
) -> SmStatus {
    guard(|| {
        if config.is_null() || best_value.is_null() || best.is_null() {
            return fail(SmStatus::NullPointer, "null argument");
        }
        // SAFETY: checked non-null.
        let c = unsafe { *config };
        let fixed = if c.fixed.is_null() {
            None
        } else {
            // SAFETY: caller guarantees a live handle.
            Some(unsafe { (*c.fixed).inner.clone() })
        };
        let cfg = OptConfig {
            restarts: c.restarts,
            max_iters: c.max_iters,
            seed: c.seed,
            tol: c.tol,
            mode: match c.mode {
                SmMode::Full => Mode::Full,
                SmMode::FixedState => Mode::FixedState,
                SmMode::FixedAlice => Mode::FixedAlice,
                SmMode::ProjectiveAlice => Mode::ProjectiveAlice,
            },
            fixed,
            threads: (c.threads > 0).then_some(c.threads),
            ..OptConfig::new(c.alice_dim, c.bob_dim, c.n_alice_outcomes, c.n_bob_outcomes)
        };
        match maximize(&cfg) {
            Ok(r) => {
                // SAFETY: checked non-null.
                unsafe {
                    *best_value = r.best_value;
                    *best = into_handle(r.best_scenario);
                }
                SmStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}
