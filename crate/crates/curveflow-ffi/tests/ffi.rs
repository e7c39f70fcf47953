//! Exercises the C ABI exactly as a foreign caller would: through the
//! exported `extern "C"` functions, out-pointers, and owned strings.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use curveflow_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cf_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned();
    unsafe { cf_string_free(ptr) };
    text
}

fn parse_gamma(json: &str) -> *mut CfGamma {
    let json = CString::new(json).unwrap();
    let mut handle: *mut CfGamma = ptr::null_mut();
    let status = unsafe { cf_gamma_parse_json(json.as_ptr(), &mut handle) };
    assert_eq!(status, CfStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

fn parse_curve(json: &str) -> *mut CfCurve {
    let json = CString::new(json).unwrap();
    let mut handle: *mut CfCurve = ptr::null_mut();
    let status = unsafe { cf_curve_parse_json(json.as_ptr(), &mut handle) };
    assert_eq!(status, CfStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

/// Unit square in the clockwise orientation the library keeps as-is, so
/// the node buffer can be compared against the input verbatim.
const SQUARE_JSON: &str =
    r#"{"topology": "closed", "nodes": [[0, 0], [0, 1], [1, 1], [1, 0]]}"#;

#[test]
fn gamma_parse_evaluate_certify_and_free() {
    let gamma = parse_gamma(r#"{"type": "k_fold", "beta": 0.05, "k": 4}"#);

    let (mut value, mut d1, mut d2) = (0.0, 0.0, 0.0);
    let status = unsafe { cf_gamma_evaluate(gamma, 0.0, &mut value, &mut d1, &mut d2) };
    assert_eq!(status, CfStatus::Ok);
    assert!((value - 1.05).abs() < 1e-14);
    assert!(d1.abs() < 1e-14);
    assert!((d2 + 0.8).abs() < 1e-13, "gamma'' at 0 is -beta k^2");

    let mut report_json: *mut c_char = ptr::null_mut();
    let status = unsafe { cf_gamma_certify_json(gamma, &mut report_json) };
    assert_eq!(status, CfStatus::Ok);
    let reports: serde_json::Value = serde_json::from_str(&take_string(report_json)).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(
        reports.iter().any(|r| r["verdict"] == "proven"),
        "amplitude 0.05 is inside the four-fold stability range: {reports:?}"
    );

    unsafe { cf_gamma_free(gamma) };
}

#[test]
fn gamma_parse_error_paths_set_status_and_message() {
    let mut handle: *mut CfGamma = ptr::null_mut();

    let status = unsafe { cf_gamma_parse_json(ptr::null(), &mut handle) };
    assert_eq!(status, CfStatus::NullArgument);
    assert!(!last_error().is_empty());

    let garbage = CString::new("not json at all").unwrap();
    let status = unsafe { cf_gamma_parse_json(garbage.as_ptr(), &mut handle) };
    assert_eq!(status, CfStatus::Parse);
    assert!(last_error().contains("anisotropy spec"));

    let zero_fold = CString::new(r#"{"type": "k_fold", "beta": 0.1, "k": 0}"#).unwrap();
    let status = unsafe { cf_gamma_parse_json(zero_fold.as_ptr(), &mut handle) };
    assert_eq!(status, CfStatus::Invalid);

    // Parses fine but the density dips below zero: rejected as invalid,
    // not as a runtime failure.
    let negative = CString::new(r#"{"type": "k_fold", "beta": 1.5, "k": 2}"#).unwrap();
    let status = unsafe { cf_gamma_parse_json(negative.as_ptr(), &mut handle) };
    assert_eq!(status, CfStatus::Invalid);
    assert!(last_error().contains("non-positive"));
}

#[test]
fn curve_roundtrip_exposes_nodes_topology_and_area() {
    let curve = parse_curve(SQUARE_JSON);

    let mut count = 0usize;
    assert_eq!(unsafe { cf_curve_node_count(curve, &mut count) }, CfStatus::Ok);
    assert_eq!(count, 4);

    let mut topology = CfTopology::Open;
    assert_eq!(unsafe { cf_curve_topology(curve, &mut topology) }, CfStatus::Ok);
    assert_eq!(topology, CfTopology::Closed);

    let mut buffer = [0.0f64; 8];
    assert_eq!(
        unsafe { cf_curve_nodes(curve, buffer.as_mut_ptr(), 4) },
        CfStatus::Ok
    );
    assert_eq!(buffer, [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0]);

    let undersized = unsafe { cf_curve_nodes(curve, buffer.as_mut_ptr(), 3) };
    assert_eq!(undersized, CfStatus::Invalid);
    assert!(last_error().contains("buffer holds 3 nodes"));

    let mut area = 0.0;
    assert_eq!(unsafe { cf_curve_area(curve, &mut area) }, CfStatus::Ok);
    assert_eq!(area, 1.0);

    let mut json_out: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { cf_curve_to_json(curve, &mut json_out) }, CfStatus::Ok);
    let round_tripped = parse_curve(&take_string(json_out));
    let mut count2 = 0usize;
    assert_eq!(unsafe { cf_curve_node_count(round_tripped, &mut count2) }, CfStatus::Ok);
    assert_eq!(count2, 4);

    unsafe {
        cf_curve_free(round_tripped);
        cf_curve_free(curve);
    }
}

#[test]
fn curve_energy_and_distance_have_closed_form_values() {
    let square = parse_curve(SQUARE_JSON);
    let shifted = parse_curve(
        r#"{"topology": "closed", "nodes": [[2, 0], [2, 1], [3, 1], [3, 0]]}"#,
    );
    let gamma = parse_gamma(r#"{"type": "isotropic"}"#);

    let mut energy = 0.0;
    assert_eq!(
        unsafe { cf_curve_energy(square, gamma, 0.0, &mut energy) },
        CfStatus::Ok
    );
    assert_eq!(energy, 4.0, "unit density integrates to the perimeter");

    let mut distance = -1.0;
    assert_eq!(unsafe { cf_distance(square, square, &mut distance) }, CfStatus::Ok);
    assert_eq!(distance, 0.0);
    assert_eq!(unsafe { cf_distance(square, shifted, &mut distance) }, CfStatus::Ok);
    assert_eq!(distance, 2.0, "disjoint unit squares differ by their union");

    let roof = parse_curve(
        r#"{"topology": "open", "nodes": [[-1, 0], [0, 1], [1, 0]]}"#,
    );
    let status = unsafe { cf_distance(square, roof, &mut distance) };
    assert_eq!(status, CfStatus::Invalid);
    assert!(!last_error().is_empty());

    unsafe {
        cf_curve_free(roof);
        cf_gamma_free(gamma);
        cf_curve_free(shifted);
        cf_curve_free(square);
    }
}

fn simulate(config: &str) -> (CfStatus, *mut CfRun) {
    let config = CString::new(config).unwrap();
    let mut handle: *mut CfRun = ptr::null_mut();
    let status = unsafe { cf_simulate_json(config.as_ptr(), &mut handle) };
    (status, handle)
}

#[test]
fn simulate_run_exposes_termination_diagnostics_and_snapshots() {
    let (status, run) = simulate(
        r#"{
            "topology": "closed",
            "shape": {"type": "square", "side": 1.0},
            "n": 16,
            "tau": 1e-3,
            "t_end": 5e-3,
            "gamma": {"type": "isotropic"},
            "snapshot_times": [2e-3]
        }"#,
    );
    assert_eq!(status, CfStatus::Ok, "{}", last_error());

    let mut termination = CfTermination::SolverFailure;
    assert_eq!(unsafe { cf_run_termination(run, &mut termination) }, CfStatus::Ok);
    assert_eq!(termination, CfTermination::ReachedTEnd);

    let mut csv: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { cf_run_diagnostics_csv(run, &mut csv) }, CfStatus::Ok);
    let csv = take_string(csv);
    assert!(csv.starts_with("t,area,energy,"));
    assert_eq!(csv.lines().count(), 7, "header, initial state, five steps");

    let mut snapshots = 0usize;
    assert_eq!(unsafe { cf_run_snapshot_count(run, &mut snapshots) }, CfStatus::Ok);
    assert_eq!(snapshots, 1);

    let mut t = 0.0;
    let mut snapshot: *mut CfCurve = ptr::null_mut();
    assert_eq!(
        unsafe { cf_run_snapshot(run, 0, &mut t, &mut snapshot) },
        CfStatus::Ok
    );
    assert_eq!(t, 2e-3);
    let mut count = 0usize;
    assert_eq!(unsafe { cf_curve_node_count(snapshot, &mut count) }, CfStatus::Ok);
    assert_eq!(count, 16);

    let out_of_range = unsafe { cf_run_snapshot(run, 1, &mut t, &mut snapshot) };
    assert_eq!(out_of_range, CfStatus::Invalid);
    assert!(last_error().contains("out of range"));

    let mut final_curve: *mut CfCurve = ptr::null_mut();
    assert_eq!(unsafe { cf_run_final_curve(run, &mut final_curve) }, CfStatus::Ok);
    let mut area = 0.0;
    assert_eq!(unsafe { cf_curve_area(final_curve, &mut area) }, CfStatus::Ok);
    assert!(area > 0.9 && area < 1.1);

    unsafe {
        cf_curve_free(final_curve);
        cf_curve_free(snapshot);
        cf_run_free(run);
    }
}

#[test]
fn simulate_rejects_bad_configs_without_a_handle() {
    let (status, run) = simulate("nonsense");
    assert_eq!(status, CfStatus::Parse);
    assert!(run.is_null());

    let (status, run) = simulate(
        r#"{
            "topology": "closed",
            "shape": {"type": "square", "side": 1.0},
            "n": 2,
            "tau": 1e-3,
            "t_end": 5e-3,
            "gamma": {"type": "isotropic"}
        }"#,
    );
    assert_eq!(status, CfStatus::Invalid);
    assert!(run.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_handles_and_out_pointers_are_rejected() {
    let mut count = 0usize;
    assert_eq!(
        unsafe { cf_curve_node_count(ptr::null(), &mut count) },
        CfStatus::NullArgument
    );

    let curve = parse_curve(SQUARE_JSON);
    assert_eq!(
        unsafe { cf_curve_node_count(curve, ptr::null_mut()) },
        CfStatus::NullArgument
    );
    assert_eq!(
        unsafe { cf_curve_nodes(curve, ptr::null_mut(), 4) },
        CfStatus::NullArgument
    );
    unsafe { cf_curve_free(curve) };

    // Frees tolerate NULL, mirroring `free(3)`.
    unsafe {
        cf_curve_free(ptr::null_mut());
        cf_gamma_free(ptr::null_mut());
        cf_run_free(ptr::null_mut());
        cf_string_free(ptr::null_mut());
    }
}

#[test]
fn last_error_tracks_the_most_recent_failure() {
    let mut handle: *mut CfGamma = ptr::null_mut();
    let garbage = CString::new("garbage").unwrap();
    unsafe { cf_gamma_parse_json(garbage.as_ptr(), &mut handle) };
    let first = last_error();
    assert!(first.contains("anisotropy spec"));

    let mut count = 0usize;
    unsafe { cf_curve_node_count(ptr::null(), &mut count) };
    let second = last_error();
    assert!(second.contains("NULL"));
    assert_ne!(first, second);
}

/// The committed C header must declare every exported symbol; this
/// catches a stale header after API changes.
#[test]
fn generated_header_covers_the_exported_api() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/curveflow.h"
    ))
    .expect("generated header present");
    for symbol in [
        "cf_last_error",
        "cf_string_free",
        "cf_gamma_parse_json",
        "cf_gamma_free",
        "cf_gamma_evaluate",
        "cf_gamma_certify_json",
        "cf_curve_parse_json",
        "cf_curve_to_json",
        "cf_curve_free",
        "cf_curve_node_count",
        "cf_curve_topology",
        "cf_curve_nodes",
        "cf_curve_area",
        "cf_curve_energy",
        "cf_distance",
        "cf_simulate_json",
        "cf_run_free",
        "cf_run_termination",
        "cf_run_final_curve",
        "cf_run_diagnostics_csv",
        "cf_run_snapshot_count",
        "cf_run_snapshot",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}
