//! Simulation driver: configuration, initial shape construction, the
//! time-stepping loop, and per-step diagnostics.
//!
//! A run advances an initial polygon with the semi-implicit step until
//! the requested end time, until the motion stalls below the equilibrium
//! tolerance, or until the step itself fails (contact points crossing,
//! unsolvable system). Each step appends one diagnostics row (areas,
//! energies, mesh quality, contact positions, maximum normal velocity),
//! and the polygon is recorded at requested snapshot times.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::anisotropy::{is_certified, GammaSpec};
use crate::error::{Error, Result};
use crate::fem;
use crate::geometry::{PolyCurve, Topology, Vec2};
use crate::io;

/// Relative slack for the per-step energy monotonicity assertion.
const ENERGY_SLACK: f64 = 1e-10;

/// Sample count for dense elliptical source polylines before resampling.
const ELLIPSE_SOURCE_SAMPLES: usize = 4096;

/// Initial region shape. Closed curves enclose the shape itself,
/// centered so translations do not hide in the node coordinates; open
/// curves trace the shape's upper boundary from the left contact point
/// over the top to the right one, with the base on the substrate.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Rectangle { width: f64, height: f64 },
    Square { side: f64 },
    /// Right triangle with the right angle at the lower-left corner.
    RightTriangle { width: f64, height: f64 },
    Ellipse { semi_x: f64, semi_y: f64 },
    /// A snapshot file; its topology must match the configuration.
    FromFile { path: PathBuf },
}

fn default_eta() -> f64 {
    100.0
}

fn default_equilibrium_tol() -> f64 {
    1e-6
}

/// Full description of one simulation. Mirrors the JSON configuration
/// file field-for-field.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub topology: Topology,
    pub shape: Shape,
    /// Segment count of the simulated polygon.
    pub n: usize,
    /// Time step.
    pub tau: f64,
    /// End time; the run takes `round(t_end / tau)` steps.
    pub t_end: f64,
    pub gamma: GammaSpec,
    /// Substrate energy difference (open curves only).
    #[serde(default)]
    pub sigma: f64,
    /// Contact-line mobility (open curves only).
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Times at which the polygon is recorded (each mapped to the
    /// nearest step).
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// The run stops early once the maximum nodal normal speed of a step
    /// falls below this.
    #[serde(default = "default_equilibrium_tol")]
    pub equilibrium_tol: f64,
    /// Arms the per-step energy monotonicity assertion. Unset: armed
    /// exactly when a stability certifier proves the energy decays for
    /// this `gamma`.
    #[serde(default)]
    pub assert_energy_monotone: Option<bool>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let min_segments = match self.topology {
            Topology::Closed => 3,
            Topology::OpenOnSubstrate => 2,
        };
        if self.n < min_segments {
            return Err(Error::InvalidConfig(format!(
                "n = {} segments is below the minimum {min_segments} for {:?}",
                self.n, self.topology
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tau = {} must be positive and finite",
                self.tau
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_end = {} must be non-negative and finite",
                self.t_end
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidMobility(self.eta));
        }
        if !(self.equilibrium_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "equilibrium_tol = {} must be positive",
                self.equilibrium_tol
            )));
        }
        if !self.sigma.is_finite() {
            return Err(Error::InvalidConfig("sigma must be finite".into()));
        }
        for &t in &self.snapshot_times {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "snapshot time {t} must be non-negative and finite"
                )));
            }
        }
        self.gamma.validate()?;
        Ok(())
    }

    /// Parses a configuration from JSON text (no validation).
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

/// Builds the initial polygon for a configuration: dense source polyline
/// from the shape (corners exact), then arc-length resampling to `n`
/// segments.
pub fn build_initial(config: &SimulationConfig) -> Result<PolyCurve> {
    let source = source_polyline(&config.shape, config.topology)?;
    source.arc_length_interpolate(config.n)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidShape(format!(
            "{name} = {v} must be positive and finite"
        )));
    }
    Ok(())
}

fn source_polyline(shape: &Shape, topology: Topology) -> Result<PolyCurve> {
    match shape {
        Shape::Rectangle { width, height } => {
            check_positive("width", *width)?;
            check_positive("height", *height)?;
            rectangle_polyline(*width, *height, topology)
        }
        Shape::Square { side } => {
            check_positive("side", *side)?;
            rectangle_polyline(*side, *side, topology)
        }
        Shape::RightTriangle { width, height } => {
            check_positive("width", *width)?;
            check_positive("height", *height)?;
            let (w, h) = (*width, *height);
            match topology {
                Topology::Closed => {
                    // Legs on the axes, shifted so the centroid is at the
                    // origin; traversal keeps the enclosed area positive.
                    let c = Vec2::new(w / 3.0, h / 3.0);
                    PolyCurve::closed(vec![
                        Vec2::new(0.0, 0.0) - c,
                        Vec2::new(0.0, h) - c,
                        Vec2::new(w, 0.0) - c,
                    ])
                }
                Topology::OpenOnSubstrate => PolyCurve::open_on_substrate(vec![
                    Vec2::new(-0.5 * w, 0.0),
                    Vec2::new(-0.5 * w, h),
                    Vec2::new(0.5 * w, 0.0),
                ]),
            }
        }
        Shape::Ellipse { semi_x, semi_y } => {
            check_positive("semi_x", *semi_x)?;
            check_positive("semi_y", *semi_y)?;
            let (a, b) = (*semi_x, *semi_y);
            let m = ELLIPSE_SOURCE_SAMPLES;
            match topology {
                Topology::Closed => {
                    // Clockwise so the enclosed area is positive as stored.
                    let nodes = (0..m)
                        .map(|i| {
                            let t = 2.0 * PI * i as f64 / m as f64;
                            Vec2::new(a * t.cos(), -b * t.sin())
                        })
                        .collect();
                    PolyCurve::closed(nodes)
                }
                Topology::OpenOnSubstrate => {
                    // Upper half, left contact to right contact.
                    let mut nodes = Vec::with_capacity(m + 1);
                    nodes.push(Vec2::new(-a, 0.0));
                    for i in 1..m {
                        let t = PI * (1.0 - i as f64 / m as f64);
                        nodes.push(Vec2::new(a * t.cos(), b * t.sin()));
                    }
                    nodes.push(Vec2::new(a, 0.0));
                    PolyCurve::open_on_substrate(nodes)
                }
            }
        }
        Shape::FromFile { path } => {
            let curve = io::read_snapshot(path)?;
            if curve.topology() != topology {
                return Err(Error::TopologyMismatch {
                    left: curve.topology(),
                    right: topology,
                });
            }
            Ok(curve)
        }
    }
}

fn rectangle_polyline(width: f64, height: f64, topology: Topology) -> Result<PolyCurve> {
    let (w, h) = (0.5 * width, height);
    match topology {
        Topology::Closed => PolyCurve::closed(vec![
            Vec2::new(-w, -0.5 * h),
            Vec2::new(-w, 0.5 * h),
            Vec2::new(w, 0.5 * h),
            Vec2::new(w, -0.5 * h),
        ]),
        Topology::OpenOnSubstrate => PolyCurve::open_on_substrate(vec![
            Vec2::new(-w, 0.0),
            Vec2::new(-w, h),
            Vec2::new(w, h),
            Vec2::new(w, 0.0),
        ]),
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// All steps up to the end time were taken.
    ReachedTEnd,
    /// The maximum nodal normal speed fell below the tolerance.
    Equilibrium,
    /// A step tried to move the left contact point past the right one.
    ContactCrossing,
    /// A step system could not be assembled or solved mid-run; the
    /// trajectory up to the failing step is kept.
    SolverFailure,
}

/// One diagnostics record per accepted step (plus the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    /// Enclosed area (open curves: between curve and substrate).
    pub area: f64,
    /// Interfacial energy (open curves: including the substrate term).
    pub energy: f64,
    /// Longest over shortest segment length.
    pub mesh_ratio: f64,
    /// Signed relative area change `(A(t) - A(0)) / A(0)`.
    pub area_loss_rel: f64,
    /// Contact point positions; `None` for closed curves.
    pub x_l: Option<f64>,
    pub x_r: Option<f64>,
    /// Maximum nodal normal speed of the step that produced this state
    /// (zero on the initial row).
    pub max_v: f64,
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub termination: Termination,
    pub final_curve: PolyCurve,
    /// One row per accepted state, starting with the initial one.
    pub diagnostics: Vec<DiagnosticsRow>,
    /// `(requested time, polygon)` pairs in request order.
    pub snapshots: Vec<(f64, PolyCurve)>,
}

/// Renders diagnostics in the CSV layout
/// `t,area,energy,mesh_ratio,area_loss_rel,x_l,x_r,max_v`, contact
/// columns left empty for closed curves.
pub fn diagnostics_to_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::from("t,area,energy,mesh_ratio,area_loss_rel,x_l,x_r,max_v\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map(io::fmt_full).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            io::fmt_full(r.t),
            io::fmt_full(r.area),
            io::fmt_full(r.energy),
            io::fmt_full(r.mesh_ratio),
            io::fmt_full(r.area_loss_rel),
            opt(r.x_l),
            opt(r.x_r),
            io::fmt_full(r.max_v)
        ));
    }
    out
}

fn diagnostics_row(
    curve: &PolyCurve,
    gamma: &GammaSpec,
    sigma: f64,
    t: f64,
    area0: f64,
    max_v: f64,
) -> Result<DiagnosticsRow> {
    let area = curve.enclosed_area();
    let energy = curve.interface_energy(gamma, sigma)?;
    let metrics = curve.mesh_metrics()?;
    let (x_l, x_r) = match curve.contact_points() {
        Some((l, r)) => (Some(l), Some(r)),
        None => (None, None),
    };
    Ok(DiagnosticsRow {
        t,
        area,
        energy,
        mesh_ratio: metrics.ratio,
        area_loss_rel: (area - area0) / area0,
        x_l,
        x_r,
        max_v,
    })
}

/// Runs a simulation to completion.
///
/// Failures of the very first step (ill-posed initial polygon,
/// unsolvable system) are hard errors; failures later in the run
/// terminate it gracefully with the partial trajectory and a
/// [`Termination`] describing why. An armed energy assertion makes any
/// energy increase a hard error.
pub fn run(config: &SimulationConfig) -> Result<RunResult> {
    config.validate()?;
    let gamma = &config.gamma;
    let mut curve = build_initial(config)?;
    fem::wellposed(&curve).map_err(|e| Error::IllPosedInitialCurve(e.to_string()))?;

    let assert_energy = match config.assert_energy_monotone {
        Some(choice) => choice,
        None => {
            let certified = is_certified(gamma)?;
            log::debug!(
                "energy monotonicity assertion {} (stability {})",
                if certified { "armed" } else { "disarmed" },
                if certified { "certified" } else { "not certified" }
            );
            certified
        }
    };

    let ratio = config.t_end / config.tau;
    let n_steps = ratio.round() as usize;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
        log::warn!(
            "t_end = {} is not a multiple of tau = {}; running {} steps to t = {}",
            config.t_end,
            config.tau,
            n_steps,
            n_steps as f64 * config.tau
        );
    }

    // Requested snapshot times, mapped to their nearest step index.
    let mut snapshot_steps: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &t_req in &config.snapshot_times {
        let step = (t_req / config.tau).round() as usize;
        if step > n_steps {
            log::warn!("snapshot time {t_req} lies beyond the end time; skipping");
            continue;
        }
        snapshot_steps.entry(step).or_default().push(t_req);
    }

    let area0 = curve.enclosed_area();
    let mut energy_prev = curve.interface_energy(gamma, config.sigma)?;
    let energy_slack = ENERGY_SLACK * energy_prev.abs().max(1.0);

    let mut diagnostics =
        vec![diagnostics_row(&curve, gamma, config.sigma, 0.0, area0, 0.0)?];
    let mut snapshots: Vec<(f64, PolyCurve)> = Vec::new();
    let record = |step: usize, curve: &PolyCurve, out: &mut Vec<(f64, PolyCurve)>| {
        if let Some(times) = snapshot_steps.get(&step) {
            for &t_req in times {
                out.push((t_req, curve.clone()));
            }
        }
    };
    record(0, &curve, &mut snapshots);

    let mut termination = Termination::ReachedTEnd;
    for m in 0..n_steps {
        let t_next = (m + 1) as f64 * config.tau;

        // Well-posedness, assembly, and solve; only the first step turns
        // failures into hard errors.
        let step = (|| -> Result<fem::StepSolution> {
            fem::wellposed(&curve)?;
            let system = match config.topology {
                Topology::Closed => fem::assemble_closed(&curve, gamma, config.tau)?,
                Topology::OpenOnSubstrate => {
                    fem::assemble_open(&curve, gamma, config.tau, config.sigma, config.eta)?
                }
            };
            fem::solve(&system)
        })();
        let solution = match step {
            Ok(s) => s,
            Err(e) if m == 0 => return Err(e),
            Err(e) => {
                log::warn!("step to t = {t_next} failed: {e}; stopping");
                termination = Termination::SolverFailure;
                break;
            }
        };

        if let Some((x_l, x_r)) = solution.curve.contact_points() {
            if x_l > x_r {
                log::warn!(
                    "contact points crossed at t = {t_next}: x_l = {x_l} > x_r = {x_r}; stopping"
                );
                termination = Termination::ContactCrossing;
                break;
            }
        }
        // Reject steps that collapsed a segment; the previous state stays
        // the final one.
        if let Err(e) = solution.curve.segment_frames() {
            log::warn!("step to t = {t_next} degenerated the mesh: {e}; stopping");
            termination = Termination::SolverFailure;
            break;
        }

        let velocities = fem::normal_velocity(&curve, &solution.curve, config.tau)?;
        let max_v = velocities.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));

        let energy = solution.curve.interface_energy(gamma, config.sigma)?;
        if assert_energy && energy > energy_prev + energy_slack {
            return Err(Error::EnergyIncrease {
                t: t_next,
                previous: energy_prev,
                current: energy,
            });
        }

        curve = solution.curve;
        energy_prev = energy;
        diagnostics.push(diagnostics_row(
            &curve,
            gamma,
            config.sigma,
            t_next,
            area0,
            max_v,
        )?);
        record(m + 1, &curve, &mut snapshots);

        if max_v < config.equilibrium_tol {
            log::info!("equilibrium detected at t = {t_next}: max |V| = {max_v:.3e}");
            termination = Termination::Equilibrium;
            break;
        }
    }

    Ok(RunResult {
        termination,
        final_curve: curve,
        diagnostics,
        snapshots,
    })
}
