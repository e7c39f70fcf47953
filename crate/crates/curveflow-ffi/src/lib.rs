//! C ABI for the curveflow solver.
//!
//! The API follows a conventional opaque-handle pattern: constructors
//! return `CF_STATUS_OK` and write a handle through an out-pointer;
//! every handle has a matching `*_free`; strings returned to the caller
//! are NUL-terminated, owned by the caller, and released with
//! [`cf_string_free`]. On any non-OK status a thread-local message with
//! details is available via [`cf_last_error`].
//!
//! Structured inputs (anisotropy specs, curve snapshots, simulation
//! configurations) cross the boundary as JSON in the same formats the
//! `curveflow` CLI uses, which keeps the surface small and stable while
//! exposing the full configuration space.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use curveflow::anisotropy::{run_all_certifiers, GammaSpec};
use curveflow::driver::{diagnostics_to_csv, run, RunResult, SimulationConfig, Termination};
use curveflow::error::Error;
use curveflow::geometry::{manifold_distance, PolyCurve, Topology};
use curveflow::io::{snapshot_from_json, snapshot_to_json};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input could not be parsed.
    Parse = 3,
    /// Input parsed but failed validation.
    Invalid = 4,
    /// The operation itself failed (solver breakdown, energy violation,
    /// early termination, internal panic).
    Runtime = 5,
}

/// Curve topology of a handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfTopology {
    Closed = 0,
    Open = 1,
}

/// Why a simulation stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfTermination {
    ReachedTEnd = 0,
    Equilibrium = 1,
    ContactCrossing = 2,
    SolverFailure = 3,
}

/// Opaque validated anisotropy spec.
pub struct CfGamma {
    inner: GammaSpec,
}

/// Opaque polygonal curve.
pub struct CfCurve {
    inner: PolyCurve,
}

/// Opaque simulation outcome.
pub struct CfRun {
    inner: RunResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes removed above");
    });
}

fn status_of(err: &Error) -> CfStatus {
    match err {
        Error::Malformed(_) => CfStatus::Parse,
        Error::InvalidConfig(_)
        | Error::InvalidShape(_)
        | Error::InvalidSpec(_)
        | Error::InvalidConvergenceSpec(_)
        | Error::InvalidMobility(_)
        | Error::InvalidCurve(_)
        | Error::NonPositiveGamma { .. }
        | Error::TopologyMismatch { .. } => CfStatus::Invalid,
        _ => CfStatus::Runtime,
    }
}

fn report(err: &Error) -> CfStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs a closure, converting panics into `CF_STATUS_RUNTIME` so they
/// never unwind across the C boundary.
fn guarded(body: impl FnOnce() -> CfStatus) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            CfStatus::Runtime
        }
    }
}

/// # Safety
/// `ptr` must be either NULL or a NUL-terminated string valid for reads.
unsafe fn utf8_in<'a>(ptr: *const c_char) -> Result<&'a str, CfStatus> {
    if ptr.is_null() {
        set_error("NULL string argument");
        return Err(CfStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CfStatus::InvalidUtf8
    })
}

fn string_out(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .expect("NUL bytes removed above")
        .into_raw()
}

unsafe fn write_out<T>(out: *mut T, value: T) -> CfStatus {
    if out.is_null() {
        set_error("NULL out-pointer");
        return CfStatus::NullArgument;
    }
    out.write(value);
    CfStatus::Ok
}

macro_rules! require {
    ($ptr:expr) => {
        match $ptr.as_ref() {
            Some(r) => r,
            None => {
                set_error("NULL handle argument");
                return CfStatus::NullArgument;
            }
        }
    };
}

/// Message describing the most recent failure on this thread. The
/// pointer stays valid until the next failing call on the same thread;
/// do not free it.
#[no_mangle]
pub extern "C" fn cf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by a `curveflow`
/// function documented to transfer string ownership, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an anisotropy spec from JSON (e.g.
/// `{"type": "k_fold", "beta": 0.05, "k": 4}`).
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn cf_gamma_parse_json(
    json: *const c_char,
    out: *mut *mut CfGamma,
) -> CfStatus {
    guarded(|| {
        let text = match utf8_in(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let spec: GammaSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => {
                set_error(&format!("anisotropy spec: {e}"));
                return CfStatus::Parse;
            }
        };
        if let Err(e) = spec.validate() {
            return report(&e);
        }
        write_out(out, Box::into_raw(Box::new(CfGamma { inner: spec })))
    })
}

/// Releases an anisotropy handle.
///
/// # Safety
/// `gamma` must be NULL or a handle from [`cf_gamma_parse_json`], not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_gamma_free(gamma: *mut CfGamma) {
    if !gamma.is_null() {
        drop(Box::from_raw(gamma));
    }
}

/// Evaluates `gamma`, `gamma'`, `gamma''` at `theta`.
///
/// # Safety
/// `gamma` must be a live handle; the out-pointers must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn cf_gamma_evaluate(
    gamma: *const CfGamma,
    theta: f64,
    value: *mut f64,
    d1: *mut f64,
    d2: *mut f64,
) -> CfStatus {
    guarded(|| {
        let handle = require!(gamma);
        match handle.inner.evaluate(theta) {
            Ok(e) => {
                if value.is_null() || d1.is_null() || d2.is_null() {
                    set_error("NULL out-pointer");
                    return CfStatus::NullArgument;
                }
                value.write(e.value);
                d1.write(e.d1);
                d2.write(e.d2);
                CfStatus::Ok
            }
            Err(e) => report(&e),
        }
    })
}

/// Runs every applicable stability certifier and returns the reports as
/// a JSON array (caller frees with [`cf_string_free`]).
///
/// # Safety
/// `gamma` must be a live handle; `out_json` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_gamma_certify_json(
    gamma: *const CfGamma,
    out_json: *mut *mut c_char,
) -> CfStatus {
    guarded(|| {
        let handle = require!(gamma);
        match run_all_certifiers(&handle.inner) {
            Ok(reports) => {
                let text = serde_json::to_string_pretty(&reports)
                    .expect("report serialization cannot fail");
                write_out(out_json, string_out(text))
            }
            Err(e) => report(&e),
        }
    })
}

/// Parses and validates a curve snapshot from JSON
/// (`{"topology": "closed", "nodes": [[x, y], ...]}`).
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_parse_json(
    json: *const c_char,
    out: *mut *mut CfCurve,
) -> CfStatus {
    guarded(|| {
        let text = match utf8_in(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match snapshot_from_json(text) {
            Ok(curve) => write_out(out, Box::into_raw(Box::new(CfCurve { inner: curve }))),
            Err(e) => report(&e),
        }
    })
}

/// Serializes a curve to snapshot JSON (caller frees with
/// [`cf_string_free`]).
///
/// # Safety
/// `curve` must be a live handle; `out_json` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_to_json(
    curve: *const CfCurve,
    out_json: *mut *mut c_char,
) -> CfStatus {
    guarded(|| {
        let handle = require!(curve);
        write_out(out_json, string_out(snapshot_to_json(&handle.inner)))
    })
}

/// Releases a curve handle.
///
/// # Safety
/// `curve` must be NULL or a curve handle from this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_free(curve: *mut CfCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of nodes of a curve.
///
/// # Safety
/// `curve` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_node_count(curve: *const CfCurve, out: *mut usize) -> CfStatus {
    guarded(|| {
        let handle = require!(curve);
        write_out(out, handle.inner.node_count())
    })
}

/// Topology of a curve.
///
/// # Safety
/// `curve` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_topology(curve: *const CfCurve, out: *mut CfTopology) -> CfStatus {
    guarded(|| {
        let handle = require!(curve);
        let topology = match handle.inner.topology() {
            Topology::Closed => CfTopology::Closed,
            Topology::OpenOnSubstrate => CfTopology::Open,
        };
        write_out(out, topology)
    })
}

/// Copies node coordinates into `buffer` as interleaved `x0, y0, x1,
/// y1, ...`. `capacity_nodes` is the number of nodes (coordinate pairs)
/// the buffer can hold.
///
/// # Safety
/// `curve` must be a live handle; `buffer` must be valid for writes of
/// `2 * capacity_nodes` doubles.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_nodes(
    curve: *const CfCurve,
    buffer: *mut f64,
    capacity_nodes: usize,
) -> CfStatus {
    guarded(|| {
        let handle = require!(curve);
        if buffer.is_null() {
            set_error("NULL buffer");
            return CfStatus::NullArgument;
        }
        let nodes = handle.inner.nodes();
        if capacity_nodes < nodes.len() {
            set_error(&format!(
                "buffer holds {capacity_nodes} nodes, curve has {}",
                nodes.len()
            ));
            return CfStatus::Invalid;
        }
        for (i, p) in nodes.iter().enumerate() {
            buffer.add(2 * i).write(p.x);
            buffer.add(2 * i + 1).write(p.y);
        }
        CfStatus::Ok
    })
}

/// Enclosed area of a curve (open curves: between curve and substrate).
///
/// # Safety
/// `curve` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_area(curve: *const CfCurve, out: *mut f64) -> CfStatus {
    guarded(|| {
        let handle = require!(curve);
        write_out(out, handle.inner.enclosed_area())
    })
}

/// Interfacial energy of a curve under an anisotropy; `sigma` is the
/// substrate energy difference (ignored for closed curves).
///
/// # Safety
/// `curve` and `gamma` must be live handles; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn cf_curve_energy(
    curve: *const CfCurve,
    gamma: *const CfGamma,
    sigma: f64,
    out: *mut f64,
) -> CfStatus {
    guarded(|| {
        let c = require!(curve);
        let g = require!(gamma);
        match c.inner.interface_energy(&g.inner, sigma) {
            Ok(v) => write_out(out, v),
            Err(e) => report(&e),
        }
    })
}

/// Symmetric-difference distance between the regions enclosed by two
/// curves of the same topology.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_distance(
    a: *const CfCurve,
    b: *const CfCurve,
    out: *mut f64,
) -> CfStatus {
    guarded(|| {
        let ca = require!(a);
        let cb = require!(b);
        match manifold_distance(&ca.inner, &cb.inner) {
            Ok(d) => write_out(out, d),
            Err(e) => report(&e),
        }
    })
}

/// Runs a full simulation from a configuration JSON (same schema as the
/// CLI) and returns a run handle.
///
/// # Safety
/// `config_json` must be a valid NUL-terminated string; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_simulate_json(
    config_json: *const c_char,
    out: *mut *mut CfRun,
) -> CfStatus {
    guarded(|| {
        let text = match utf8_in(config_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config = match SimulationConfig::from_json(text) {
            Ok(c) => c,
            Err(e) => return report(&e),
        };
        match run(&config) {
            Ok(result) => write_out(out, Box::into_raw(Box::new(CfRun { inner: result }))),
            Err(e) => report(&e),
        }
    })
}

/// Releases a run handle.
///
/// # Safety
/// `run` must be NULL or a handle from [`cf_simulate_json`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn cf_run_free(run: *mut CfRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Why the run stopped.
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_run_termination(
    run: *const CfRun,
    out: *mut CfTermination,
) -> CfStatus {
    guarded(|| {
        let handle = require!(run);
        let termination = match handle.inner.termination {
            Termination::ReachedTEnd => CfTermination::ReachedTEnd,
            Termination::Equilibrium => CfTermination::Equilibrium,
            Termination::ContactCrossing => CfTermination::ContactCrossing,
            Termination::SolverFailure => CfTermination::SolverFailure,
        };
        write_out(out, termination)
    })
}

/// Clones the final curve of a run into a fresh handle.
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_run_final_curve(run: *const CfRun, out: *mut *mut CfCurve) -> CfStatus {
    guarded(|| {
        let handle = require!(run);
        let curve = handle.inner.final_curve.clone();
        write_out(out, Box::into_raw(Box::new(CfCurve { inner: curve })))
    })
}

/// Renders the per-step diagnostics of a run as CSV (caller frees with
/// [`cf_string_free`]).
///
/// # Safety
/// `run` must be a live handle; `out_csv` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_run_diagnostics_csv(
    run: *const CfRun,
    out_csv: *mut *mut c_char,
) -> CfStatus {
    guarded(|| {
        let handle = require!(run);
        write_out(
            out_csv,
            string_out(diagnostics_to_csv(&handle.inner.diagnostics)),
        )
    })
}

/// Number of recorded snapshots of a run.
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_run_snapshot_count(run: *const CfRun, out: *mut usize) -> CfStatus {
    guarded(|| {
        let handle = require!(run);
        write_out(out, handle.inner.snapshots.len())
    })
}

/// Fetches snapshot `index` of a run: its requested time and a fresh
/// curve handle.
///
/// # Safety
/// `run` must be a live handle; `out_t` and `out_curve` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_run_snapshot(
    run: *const CfRun,
    index: usize,
    out_t: *mut f64,
    out_curve: *mut *mut CfCurve,
) -> CfStatus {
    guarded(|| {
        let handle = require!(run);
        let Some((t, curve)) = handle.inner.snapshots.get(index) else {
            set_error(&format!(
                "snapshot index {index} out of range ({} recorded)",
                handle.inner.snapshots.len()
            ));
            return CfStatus::Invalid;
        };
        if out_t.is_null() {
            set_error("NULL out-pointer");
            return CfStatus::NullArgument;
        }
        out_t.write(*t);
        write_out(out_curve, Box::into_raw(Box::new(CfCurve { inner: curve.clone() })))
    })
}
