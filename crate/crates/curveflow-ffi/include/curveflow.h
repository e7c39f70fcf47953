#ifndef CURVEFLOW_H
#define CURVEFLOW_H

/* Generated by cbindgen from the curveflow-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status code of every fallible call.
 */
typedef enum CfStatus {
  /*
   Success.
   */
  CF_STATUS_OK = 0,
  /*
   A required pointer argument was NULL.
   */
  CF_STATUS_NULL_ARGUMENT = 1,
  /*
   A string argument was not valid UTF-8.
   */
  CF_STATUS_INVALID_UTF8 = 2,
  /*
   Input could not be parsed.
   */
  CF_STATUS_PARSE = 3,
  /*
   Input parsed but failed validation.
   */
  CF_STATUS_INVALID = 4,
  /*
   The operation itself failed (solver breakdown, energy violation,
   early termination, internal panic).
   */
  CF_STATUS_RUNTIME = 5,
} CfStatus;

/*
 Curve topology of a handle.
 */
typedef enum CfTopology {
  CF_TOPOLOGY_CLOSED = 0,
  CF_TOPOLOGY_OPEN = 1,
} CfTopology;

/*
 Why a simulation stopped.
 */
typedef enum CfTermination {
  CF_TERMINATION_REACHED_T_END = 0,
  CF_TERMINATION_EQUILIBRIUM = 1,
  CF_TERMINATION_CONTACT_CROSSING = 2,
  CF_TERMINATION_SOLVER_FAILURE = 3,
} CfTermination;

/*
 Opaque polygonal curve.
 */
typedef struct CfCurve CfCurve;

/*
 Opaque validated anisotropy spec.
 */
typedef struct CfGamma CfGamma;

/*
 Opaque simulation outcome.
 */
typedef struct CfRun CfRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread. The
 pointer stays valid until the next failing call on the same thread;
 do not free it.
 */
const char *cf_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be NULL or a pointer previously returned by a `curveflow`
 function documented to transfer string ownership, not yet freed.
 */
void cf_string_free(char *s);

/*
 Parses and validates an anisotropy spec from JSON (e.g.
 `{"type": "k_fold", "beta": 0.05, "k": 4}`).

 # Safety
 `json` must be a valid NUL-terminated string; `out` must be valid for
 writes.
 */
enum CfStatus cf_gamma_parse_json(const char *json, struct CfGamma **out);

/*
 Releases an anisotropy handle.

 # Safety
 `gamma` must be NULL or a handle from [`cf_gamma_parse_json`], not
 yet freed.
 */
void cf_gamma_free(struct CfGamma *gamma);

/*
 Evaluates `gamma`, `gamma'`, `gamma''` at `theta`.

 # Safety
 `gamma` must be a live handle; the out-pointers must be valid for
 writes.
 */
enum CfStatus cf_gamma_evaluate(const struct CfGamma *gamma,
                                double theta,
                                double *value,
                                double *d1,
                                double *d2);

/*
 Runs every applicable stability certifier and returns the reports as
 a JSON array (caller frees with [`cf_string_free`]).

 # Safety
 `gamma` must be a live handle; `out_json` must be valid for writes.
 */
enum CfStatus cf_gamma_certify_json(const struct CfGamma *gamma, char **out_json);

/*
 Parses and validates a curve snapshot from JSON
 (`{"topology": "closed", "nodes": [[x, y], ...]}`).

 # Safety
 `json` must be a valid NUL-terminated string; `out` must be valid for
 writes.
 */
enum CfStatus cf_curve_parse_json(const char *json, struct CfCurve **out);

/*
 Serializes a curve to snapshot JSON (caller frees with
 [`cf_string_free`]).

 # Safety
 `curve` must be a live handle; `out_json` must be valid for writes.
 */
enum CfStatus cf_curve_to_json(const struct CfCurve *curve, char **out_json);

/*
 Releases a curve handle.

 # Safety
 `curve` must be NULL or a curve handle from this library, not yet
 freed.
 */
void cf_curve_free(struct CfCurve *curve);

/*
 Number of nodes of a curve.

 # Safety
 `curve` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_curve_node_count(const struct CfCurve *curve, uintptr_t *out);

/*
 Topology of a curve.

 # Safety
 `curve` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_curve_topology(const struct CfCurve *curve, enum CfTopology *out);

/*
 Copies node coordinates into `buffer` as interleaved `x0, y0, x1,
 y1, ...`. `capacity_nodes` is the number of nodes (coordinate pairs)
 the buffer can hold.

 # Safety
 `curve` must be a live handle; `buffer` must be valid for writes of
 `2 * capacity_nodes` doubles.
 */
enum CfStatus cf_curve_nodes(const struct CfCurve *curve, double *buffer, uintptr_t capacity_nodes);

/*
 Enclosed area of a curve (open curves: between curve and substrate).

 # Safety
 `curve` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_curve_area(const struct CfCurve *curve, double *out);

/*
 Interfacial energy of a curve under an anisotropy; `sigma` is the
 substrate energy difference (ignored for closed curves).

 # Safety
 `curve` and `gamma` must be live handles; `out` must be valid for
 writes.
 */
enum CfStatus cf_curve_energy(const struct CfCurve *curve,
                              const struct CfGamma *gamma,
                              double sigma,
                              double *out);

/*
 Symmetric-difference distance between the regions enclosed by two
 curves of the same topology.

 # Safety
 `a` and `b` must be live handles; `out` must be valid for writes.
 */
enum CfStatus cf_distance(const struct CfCurve *a, const struct CfCurve *b, double *out);

/*
 Runs a full simulation from a configuration JSON (same schema as the
 CLI) and returns a run handle.

 # Safety
 `config_json` must be a valid NUL-terminated string; `out` must be
 valid for writes.
 */
enum CfStatus cf_simulate_json(const char *config_json, struct CfRun **out);

/*
 Releases a run handle.

 # Safety
 `run` must be NULL or a handle from [`cf_simulate_json`], not yet
 freed.
 */
void cf_run_free(struct CfRun *run);

/*
 Why the run stopped.

 # Safety
 `run` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_run_termination(const struct CfRun *run, enum CfTermination *out);

/*
 Clones the final curve of a run into a fresh handle.

 # Safety
 `run` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_run_final_curve(const struct CfRun *run, struct CfCurve **out);

/*
 Renders the per-step diagnostics of a run as CSV (caller frees with
 [`cf_string_free`]).

 # Safety
 `run` must be a live handle; `out_csv` must be valid for writes.
 */
enum CfStatus cf_run_diagnostics_csv(const struct CfRun *run, char **out_csv);

/*
 Number of recorded snapshots of a run.

 # Safety
 `run` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_run_snapshot_count(const struct CfRun *run, uintptr_t *out);

/*
 Fetches snapshot `index` of a run: its requested time and a fresh
 curve handle.

 # Safety
 `run` must be a live handle; `out_t` and `out_curve` must be valid
 for writes.
 */
enum CfStatus cf_run_snapshot(const struct CfRun *run,
                              uintptr_t index,
                              double *out_t,
                              struct CfCurve **out_curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVEFLOW_H */
