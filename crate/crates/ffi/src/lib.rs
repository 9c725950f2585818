//! C ABI for `corona-pdo`.
//!
//! Objects are opaque handles released with their `_free` function. Every
//! fallible call returns a [`CpdoStatus`]; on failure the message is available
//! from [`cpdo_last_error_message`] on the same thread. Strings returned by the
//! library are released with [`cpdo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use corona_pdo::config::RunConfig;
use corona_pdo::fourier::{fourier_to, inverse_fourier_to, Engine};
use corona_pdo::lca::{dual_grid, GridFunction, GroupGrid, GroupKind};
use corona_pdo::pdo::{op_matrix, PdoOperator};
use corona_pdo::runner::run;
use corona_pdo::symbols::{parse_dual, parse_x, Symbol};
use corona_pdo::Error;
use num_complex::Complex64;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpdoStatus {
    Ok = 0,
    InvalidGroup = 1,
    GridMismatch = 2,
    BandViolation = 3,
    Dimension = 4,
    InvalidArgument = 5,
    Unsupported = 6,
    Numerical = 7,
    Config = 8,
    Io = 9,
    NullPointer = 10,
    InvalidUtf8 = 11,
    Panic = 12,
    Other = 13,
}

/// `re + i·im`, layout-compatible with `double[2]`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CpdoComplex {
    pub re: f64,
    pub im: f64,
}

/// Discretized group together with its full dual.
pub struct CpdoGroup {
    x: GroupGrid,
    dual: GroupGrid,
}

/// Dense operator `Op(f)` on a group.
pub struct CpdoOperator {
    op: PdoOperator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CpdoStatus {
    match e {
        Error::InvalidGroup(_) => CpdoStatus::InvalidGroup,
        Error::GridMismatch(_) => CpdoStatus::GridMismatch,
        Error::BandViolation(_) => CpdoStatus::BandViolation,
        Error::Dimension { .. } => CpdoStatus::Dimension,
        Error::InvalidArgument(_) | Error::EmptyMemberSet { .. } | Error::TabulatedOnly => CpdoStatus::InvalidArgument,
        Error::Unsupported(_) => CpdoStatus::Unsupported,
        Error::Numerical(_) => CpdoStatus::Numerical,
        Error::Config(_) | Error::Json(_) | Error::Csv(_) => CpdoStatus::Config,
        Error::Io(_) => CpdoStatus::Io,
    }
}

struct Failure(CpdoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CpdoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CpdoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CpdoStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(CpdoStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(CpdoStatus::InvalidUtf8, e.to_string()))
}

unsafe fn complex_slice<'a>(p: *const CpdoComplex, len: usize) -> Result<&'a [Complex64], Failure> {
    if p.is_null() {
        return Err(null());
    }
    // CpdoComplex and Complex64 are both two packed f64.
    Ok(std::slice::from_raw_parts(p.cast::<Complex64>(), len))
}

unsafe fn write_complex(values: &[Complex64], out: *mut CpdoComplex, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    if len != values.len() {
        return Err(Failure(CpdoStatus::Dimension, format!("output buffer holds {len}, need {}", values.len())));
    }
    let dst = std::slice::from_raw_parts_mut(out, len);
    for (d, v) in dst.iter_mut().zip(values) {
        *d = CpdoComplex { re: v.re, im: v.im };
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn cpdo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cpdo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cpdo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a group descriptor such as `{"kind": "finite-cyclic", "order": 8}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cpdo_group_from_json(json: *const c_char, out: *mut *mut CpdoGroup) -> CpdoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let kind: GroupKind = serde_json::from_str(text(json)?).map_err(|e| Failure(CpdoStatus::Config, e.to_string()))?;
        let x = GroupGrid::new(kind)?;
        let dual = dual_grid(&x)?;
        *out = Box::into_raw(Box::new(CpdoGroup { x, dual }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from [`cpdo_group_from_json`].
#[no_mangle]
pub unsafe extern "C" fn cpdo_group_free(g: *mut CpdoGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of grid points (0 for a null handle).
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn cpdo_group_len(g: *const CpdoGroup) -> usize {
    g.as_ref().map_or(0, |g| g.x.len())
}

unsafe fn transform(
    g: *const CpdoGroup,
    input: *const CpdoComplex,
    len: usize,
    output: *mut CpdoComplex,
    inverse: bool,
) -> CpdoStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        let (from, to) = if inverse { (&g.dual, &g.x) } else { (&g.x, &g.dual) };
        let u = GridFunction::new(from.clone(), complex_slice(input, len)?.to_vec())?;
        let v = if inverse { inverse_fourier_to(&u, to, Engine::Auto)? } else { fourier_to(&u, to, Engine::Auto)? };
        write_complex(&v.values, output, len)
    })
}

/// Fourier transform onto the dual grid; `input` and `output` hold `len` = group length values.
///
/// # Safety
/// Buffers must hold `len` elements; `g` must be a live group handle.
#[no_mangle]
pub unsafe extern "C" fn cpdo_fourier(
    g: *const CpdoGroup,
    input: *const CpdoComplex,
    len: usize,
    output: *mut CpdoComplex,
) -> CpdoStatus {
    transform(g, input, len, output, false)
}

/// Inverse Fourier transform from the dual grid.
///
/// # Safety
/// As for [`cpdo_fourier`].
#[no_mangle]
pub unsafe extern "C" fn cpdo_inverse_fourier(
    g: *const CpdoGroup,
    input: *const CpdoComplex,
    len: usize,
    output: *mut CpdoComplex,
) -> CpdoStatus {
    transform(g, input, len, output, true)
}

/// Dense `Op(γ ⊗ ψ)` on the group and its full dual; `gamma` and `psi` are
/// family names such as `"trig:2:1"` and `"vo:sqrt"`.
///
/// # Safety
/// Strings must be NUL-terminated; `g` a live group handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cpdo_operator_from_tensor(
    g: *const CpdoGroup,
    gamma: *const c_char,
    psi: *const c_char,
    out: *mut *mut CpdoOperator,
) -> CpdoStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let f = Symbol::tensor(parse_x(text(gamma)?)?, parse_dual(text(psi)?)?, g.x.clone(), g.dual.clone())?;
        *out = Box::into_raw(Box::new(CpdoOperator { op: op_matrix(&f)? }));
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from [`cpdo_operator_from_tensor`].
#[no_mangle]
pub unsafe extern "C" fn cpdo_operator_free(op: *mut CpdoOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Side length of the operator matrix (0 for a null handle).
///
/// # Safety
/// `op` must be null or a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn cpdo_operator_dim(op: *const CpdoOperator) -> usize {
    op.as_ref().map_or(0, |o| o.op.dim())
}

/// Copies the matrix in row-major order into `out`, which holds `len = dim²` values.
///
/// # Safety
/// `out` must hold `len` elements; `op` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cpdo_operator_copy_matrix(op: *const CpdoOperator, out: *mut CpdoComplex, len: usize) -> CpdoStatus {
    guard(|| {
        let m = op.as_ref().ok_or_else(null)?.op.dense()?;
        let row_major: Vec<Complex64> = m.transpose().iter().copied().collect();
        write_complex(&row_major, out, len)
    })
}

/// `output = Op(f) input`, both of length `dim`.
///
/// # Safety
/// Buffers must hold `len` elements; `op` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cpdo_operator_apply(
    op: *const CpdoOperator,
    input: *const CpdoComplex,
    len: usize,
    output: *mut CpdoComplex,
) -> CpdoStatus {
    guard(|| {
        let o = &op.as_ref().ok_or_else(null)?.op;
        let u = GridFunction::new(o.xgrid.clone(), complex_slice(input, len)?.to_vec())?;
        write_complex(&o.apply(&u)?.values, output, len)
    })
}

/// Runs a JSON run configuration. On success `*report` receives the JSON
/// report (free with [`cpdo_string_free`]) and `*exit_code` is 0, or 2 when a
/// contract violation was detected. Relative paths resolve against the working directory.
///
/// # Safety
/// `config_json` must be NUL-terminated; `report` and `exit_code` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cpdo_run_config(
    config_json: *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> CpdoStatus {
    guard(|| {
        if report.is_null() || exit_code.is_null() {
            return Err(null());
        }
        let cfg = RunConfig::from_json(text(config_json)?)?;
        let outcome = run(&cfg, Path::new("."))?;
        let json = outcome.to_json(&cfg)?;
        *report = CString::new(json).map_err(|e| Failure(CpdoStatus::Other, e.to_string()))?.into_raw();
        *exit_code = outcome.exit_code();
        Ok(())
    })
}
