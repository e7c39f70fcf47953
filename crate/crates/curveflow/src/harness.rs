//! Mesh-refinement convergence studies.
//!
//! A study runs the same simulation at a list of mesh sizes `h` with the
//! time step coupled as `tau = h^2`, plus one much finer reference
//! resolution, and measures the symmetric-difference distance between
//! each member and the reference at a set of evaluation times. The decay
//! of those errors under refinement gives the observed convergence
//! order.
//!
//! The mesh size maps to the segment count as `n = round(1 / h)`; the
//! reference trajectory is computed once and shared across the sweep.

use rayon::prelude::*;

use crate::driver::{run, SimulationConfig, Termination};
use crate::error::{Error, Result};
use crate::geometry::{manifold_distance, PolyCurve};
use crate::io;

/// Environment variable capping the worker threads of the `h`-sweep.
pub const THREADS_ENV: &str = "CURVEFLOW_THREADS";

/// Fitted orders at or above this bound count as passing a study.
pub const ORDER_PASS_THRESHOLD: f64 = 1.7;

fn default_h_list() -> Vec<f64> {
    vec![0.125, 0.0625, 0.03125]
}

fn default_eval_times() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}

fn default_reference_h() -> f64 {
    1.0 / 128.0
}

fn default_reference_tau() -> f64 {
    1.0 / 16384.0
}

/// Description of a convergence study. The embedded base configuration
/// supplies shape, topology, anisotropy, and contact parameters; its
/// resolution fields (`n`, `tau`, `t_end`, `snapshot_times`,
/// `equilibrium_tol`) are overridden per sweep member.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub base: SimulationConfig,
    /// Mesh sizes of the sweep members.
    #[serde(default = "default_h_list")]
    pub h_list: Vec<f64>,
    /// Times at which members are compared with the reference; the last
    /// one is the simulated horizon.
    #[serde(default = "default_eval_times")]
    pub eval_times: Vec<f64>,
    /// Mesh size of the reference run (must be finer than every member).
    #[serde(default = "default_reference_h")]
    pub reference_h: f64,
    /// Time step of the reference run.
    #[serde(default = "default_reference_tau")]
    pub reference_tau: f64,
}

impl ConvergenceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("convergence spec: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_list.is_empty() {
            return Err(Error::InvalidConvergenceSpec("empty mesh-size list".into()));
        }
        for &h in &self.h_list {
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::InvalidConvergenceSpec(format!(
                    "mesh size h = {h} out of range (0, 1)"
                )));
            }
        }
        let h_min = self.h_list.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(self.reference_h > 0.0 && self.reference_h < h_min) {
            return Err(Error::InvalidConvergenceSpec(format!(
                "reference mesh size {} must be finer than every member (min {h_min})",
                self.reference_h
            )));
        }
        if !(self.reference_tau > 0.0) {
            return Err(Error::InvalidConvergenceSpec(
                "reference time step must be positive".into(),
            ));
        }
        if self.eval_times.is_empty() {
            return Err(Error::InvalidConvergenceSpec(
                "no evaluation times given".into(),
            ));
        }
        for &t in &self.eval_times {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConvergenceSpec(format!(
                    "evaluation time {t} must be positive and finite"
                )));
            }
            for (label, tau) in self
                .h_list
                .iter()
                .map(|&h| ("member", h * h))
                .chain(std::iter::once(("reference", self.reference_tau)))
            {
                let steps = t / tau;
                if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                    return Err(Error::InvalidConvergenceSpec(format!(
                        "evaluation time {t} is not a step multiple of the {label} \
                         time step {tau}"
                    )));
                }
            }
        }
        // Resolution-independent parts of the base configuration must be
        // sound; resolution fields are overridden per member.
        self.member_config(self.h_list[0]).validate()
    }

    /// The simulation configuration of the sweep member with mesh size
    /// `h` (time step `h^2`).
    pub fn member_config(&self, h: f64) -> SimulationConfig {
        self.resolved_config(segments_for(h), h * h)
    }

    /// The simulation configuration of the reference run.
    pub fn reference_config(&self) -> SimulationConfig {
        self.resolved_config(segments_for(self.reference_h), self.reference_tau)
    }

    fn resolved_config(&self, n: usize, tau: f64) -> SimulationConfig {
        let mut config = self.base.clone();
        config.n = n;
        config.tau = tau;
        config.t_end = self.eval_times.iter().cloned().fold(0.0, f64::max);
        config.snapshot_times = self.eval_times.clone();
        // Convergence members must reach the horizon; disable early
        // equilibrium stopping.
        config.equilibrium_tol = f64::MIN_POSITIVE;
        config
    }
}

/// Segment count for mesh size `h` under the `h = 1/n` convention.
pub fn segments_for(h: f64) -> usize {
    (1.0 / h).round() as usize
}

/// One `(h, t)` measurement of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub t: f64,
    /// Symmetric-difference distance to the reference at time `t`.
    pub error: f64,
    /// Observed order against the previous (coarser) mesh size; `None`
    /// on the coarsest.
    pub order: Option<f64>,
}

/// Full outcome of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Measurements grouped by evaluation time, coarse to fine.
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log h` per evaluation
    /// time; empty when the sweep has a single mesh size.
    pub fitted_orders: Vec<(f64, f64)>,
    /// Reference polygons at the evaluation times (the shared trajectory
    /// every member was compared against).
    pub reference: Vec<(f64, PolyCurve)>,
}

impl ConvergenceReport {
    /// True when every fitted order reaches the pass threshold. A
    /// single-member sweep has no orders and passes vacuously.
    pub fn passes(&self) -> bool {
        self.fitted_orders
            .iter()
            .all(|(_, p)| *p >= ORDER_PASS_THRESHOLD)
    }

    /// CSV rendering with columns `h,t,error,order`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,t,error,order\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.h,
                r.t,
                io::fmt_full(r.error),
                r.order.map(|o| format!("{o:.6}")).unwrap_or_default()
            ));
        }
        out
    }
}

fn run_to_horizon(config: &SimulationConfig, label: &str) -> Result<Vec<(f64, PolyCurve)>> {
    let result = run(config)?;
    if result.termination != Termination::ReachedTEnd {
        return Err(Error::InvalidConvergenceSpec(format!(
            "{label} run (n = {}) terminated early: {:?}",
            config.n, result.termination
        )));
    }
    Ok(result.snapshots)
}

fn snapshot_at(snapshots: &[(f64, PolyCurve)], t: f64) -> Result<&PolyCurve> {
    snapshots
        .iter()
        .find(|(time, _)| *time == t)
        .map(|(_, c)| c)
        .ok_or_else(|| {
            Error::InvalidConvergenceSpec(format!("missing snapshot at evaluation time {t}"))
        })
}

/// Runs a convergence study: one reference trajectory, then every sweep
/// member (in parallel, bounded by the `CURVEFLOW_THREADS` environment
/// variable), then error decay and order fits per evaluation time.
pub fn run_convergence(spec: &ConvergenceSpec) -> Result<ConvergenceReport> {
    spec.validate()?;

    let reference = run_to_horizon(&spec.reference_config(), "reference")?;

    // Sweep members, coarse to fine.
    let mut h_sorted = spec.h_list.clone();
    h_sorted.sort_by(|a, b| b.partial_cmp(a).expect("validated finite mesh sizes"));
    let member_runs: Result<Vec<_>> = in_thread_pool(|| {
        h_sorted
            .par_iter()
            .map(|&h| Ok((h, run_to_horizon(&spec.member_config(h), "member")?)))
            .collect()
    });
    let member_runs = member_runs?;

    let mut rows = Vec::new();
    let mut fitted_orders = Vec::new();
    for &t in &spec.eval_times {
        let reference_curve = snapshot_at(&reference, t)?;
        let mut samples: Vec<(f64, f64)> = Vec::with_capacity(member_runs.len());
        for (h, snapshots) in &member_runs {
            let error = manifold_distance(snapshot_at(snapshots, t)?, reference_curve)?;
            samples.push((*h, error));
        }
        for (i, &(h, error)) in samples.iter().enumerate() {
            let order = (i > 0).then(|| {
                let (h_prev, e_prev) = samples[i - 1];
                (e_prev.max(f64::MIN_POSITIVE) / error.max(f64::MIN_POSITIVE)).ln()
                    / (h_prev / h).ln()
            });
            rows.push(ConvergenceRow { h, t, error, order });
        }
        if samples.len() >= 2 {
            fitted_orders.push((t, fit_order(&samples)));
        }
    }
    Ok(ConvergenceReport {
        rows,
        fitted_orders,
        reference,
    })
}

/// Least-squares slope of `ln error` versus `ln h`.
fn fit_order(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(h, e) in samples {
        let x = h.ln();
        let y = e.max(f64::MIN_POSITIVE).ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Runs `body` inside a thread pool sized by the `CURVEFLOW_THREADS`
/// environment variable, or the global pool when the variable is unset.
fn in_thread_pool<T: Send>(body: impl FnOnce() -> T + Send) -> T {
    match std::env::var(THREADS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                    Ok(pool) => pool.install(body),
                    Err(e) => {
                        log::warn!("could not build {threads}-thread pool ({e}); using default");
                        body()
                    }
                }
            }
            _ => {
                log::warn!("ignoring invalid {THREADS_ENV} value {raw:?}");
                body()
            }
        },
        Err(_) => body(),
    }
}
