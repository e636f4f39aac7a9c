//! C ABI for the vector-perturbation SWIPT simulator.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! entry point returns a [`VpsimStatus`] code and writes its result through
//! an out-pointer. String results are heap-allocated C strings released with
//! [`vpsim_string_free`]. The most recent error message for the calling
//! thread is available via [`vpsim_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vpsim::error::Error;
use vpsim::harness::output::{render_sweep, OutputFormat};
use vpsim::harness::{run_eta_sweep, run_sweep, SimConfig, SweepResult};

/// Status codes returned by every C-ABI entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VpsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidInput = 4,
    SingularChannel = 5,
    DegenerateLattice = 6,
    BudgetExceeded = 7,
    QuadratureFailure = 8,
    NumericalInstability = 9,
    IoError = 10,
    JsonError = 11,
    Panic = 12,
}

impl From<&Error> for VpsimStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidConfig(_) => VpsimStatus::InvalidConfig,
            Error::InvalidInput(_) => VpsimStatus::InvalidInput,
            Error::SingularChannel { .. } => VpsimStatus::SingularChannel,
            Error::DegenerateLattice { .. } => VpsimStatus::DegenerateLattice,
            Error::BudgetExceeded { .. } => VpsimStatus::BudgetExceeded,
            Error::QuadratureFailure { .. } => VpsimStatus::QuadratureFailure,
            Error::NumericalInstability(_) => VpsimStatus::NumericalInstability,
            Error::Io { .. } => VpsimStatus::IoError,
            Error::Json(_) => VpsimStatus::JsonError,
        }
    }
}

/// Opaque simulation configuration handle.
pub struct VpsimConfig {
    inner: SimConfig,
}

/// Opaque sweep result handle.
pub struct VpsimResult {
    inner: SweepResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(e: &Error) -> VpsimStatus {
    set_last_error(&e.to_string());
    VpsimStatus::from(e)
}

fn guard<F: FnOnce() -> VpsimStatus>(f: F) -> VpsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            VpsimStatus::Panic
        }
    }
}

/// Message describing the most recent error on this thread. The pointer is
/// owned by the library and valid until the next failing call on the same
/// thread; do not free it.
#[no_mangle]
pub extern "C" fn vpsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a JSON configuration (same schema as the CLI `--config` file;
/// missing fields take their defaults) into a new handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_config_from_json(
    json: *const c_char,
    out: *mut *mut VpsimConfig,
) -> VpsimStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_last_error("configuration string is not valid UTF-8");
                return VpsimStatus::InvalidUtf8;
            }
        };
        let cfg: SimConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(&Error::Json(e)),
        };
        if let Err(e) = cfg.validate() {
            return fail(&e);
        }
        unsafe {
            *out = Box::into_raw(Box::new(VpsimConfig { inner: cfg }));
        }
        VpsimStatus::Ok
    })
}

/// Default configuration handle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_config_default(out: *mut *mut VpsimConfig) -> VpsimStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        unsafe {
            *out = Box::into_raw(Box::new(VpsimConfig {
                inner: SimConfig::default(),
            }));
        }
        VpsimStatus::Ok
    })
}

/// Serializes a configuration handle back to JSON.
///
/// # Safety
/// `cfg` must be a live handle from this library, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_config_to_json(
    cfg: *const VpsimConfig,
    out: *mut *mut c_char,
) -> VpsimStatus {
    guard(|| {
        if cfg.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        let cfg = unsafe { &*cfg };
        match serde_json::to_string_pretty(&cfg.inner) {
            Ok(json) => {
                let c = CString::new(json).unwrap_or_default();
                unsafe { *out = c.into_raw() };
                VpsimStatus::Ok
            }
            Err(e) => fail(&Error::Json(e)),
        }
    })
}

/// Releases a configuration handle. Passing NULL is a no-op.
///
/// # Safety
/// `cfg` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vpsim_config_free(cfg: *mut VpsimConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

unsafe fn run_with(
    cfg: *const VpsimConfig,
    out: *mut *mut VpsimResult,
    runner: fn(&SimConfig) -> vpsim::error::Result<SweepResult>,
) -> VpsimStatus {
    guard(|| {
        if cfg.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        let cfg = unsafe { &*cfg };
        match runner(&cfg.inner) {
            Ok(result) => {
                unsafe { *out = Box::into_raw(Box::new(VpsimResult { inner: result })) };
                VpsimStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Runs a Monte Carlo sweep over the configured power grid.
///
/// # Safety
/// `cfg` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_run_sweep(
    cfg: *const VpsimConfig,
    out: *mut *mut VpsimResult,
) -> VpsimStatus {
    unsafe { run_with(cfg, out, run_sweep) }
}

/// Runs a sweep over the VP-SWIPT blend parameter at fixed power.
///
/// # Safety
/// `cfg` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_run_eta_sweep(
    cfg: *const VpsimConfig,
    out: *mut *mut VpsimResult,
) -> VpsimStatus {
    unsafe { run_with(cfg, out, run_eta_sweep) }
}

fn render(result: &VpsimResult, format: OutputFormat, out: *mut *mut c_char) -> VpsimStatus {
    match render_sweep(&result.inner, format) {
        Ok(text) => {
            let c = CString::new(text).unwrap_or_default();
            unsafe { *out = c.into_raw() };
            VpsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Renders a result as CSV (fixed column schema).
///
/// # Safety
/// `result` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_result_to_csv(
    result: *const VpsimResult,
    out: *mut *mut c_char,
) -> VpsimStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        render(unsafe { &*result }, OutputFormat::Csv, out)
    })
}

/// Renders a result as JSON with the config echo.
///
/// # Safety
/// `result` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_result_to_json(
    result: *const VpsimResult,
    out: *mut *mut c_char,
) -> VpsimStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        render(unsafe { &*result }, OutputFormat::Json, out)
    })
}

/// Releases a result handle. Passing NULL is a no-op.
///
/// # Safety
/// `result` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vpsim_result_free(result: *mut VpsimResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Releases a string returned by this library. Passing NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vpsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

fn scalar(out: *mut f64, v: vpsim::error::Result<f64>) -> VpsimStatus {
    match v {
        Ok(value) => {
            unsafe { *out = value };
            VpsimStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Closed-form lower bound on the expected VP power scaling factor.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_egamma_lower_bound(
    m: u32,
    k: u32,
    tau: f64,
    out: *mut f64,
) -> VpsimStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        scalar(out, vpsim::theory::egamma_lower_bound(m as usize, k as usize, tau))
    })
}

/// CDF of the largest eigenvalue of a complex Wishart matrix.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_wishart_max_eig_cdf(
    x: f64,
    m: u32,
    k: u32,
    out: *mut f64,
) -> VpsimStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        scalar(out, vpsim::theory::wishart_max_eig_cdf(x, m as usize, k as usize))
    })
}

/// Predicted per-user harvested power of the VP-EH scheme.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_eeh_theory(p: f64, m: u32, k: u32, out: *mut f64) -> VpsimStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        scalar(out, vpsim::theory::eeh_theory(p, m as usize, k as usize))
    })
}

/// Outage probability of the VP-EH equivalent channel.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vpsim_outage_probability(
    p: f64,
    r_bits: f64,
    m: u32,
    k: u32,
    c_mag2: f64,
    out: *mut f64,
) -> VpsimStatus {
    guard(|| {
        if out.is_null() {
            set_last_error("null pointer argument");
            return VpsimStatus::NullPointer;
        }
        scalar(
            out,
            vpsim::theory::outage_probability(p, r_bits, m as usize, k as usize, c_mag2),
        )
    })
}
