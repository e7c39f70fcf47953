//! Assembly and solution of the semi-implicit step system, plus
//! well-posedness checks, curvature/potential recovery, and normal
//! velocities.
//!
//! One time step advances the polygon `X^m` to `X^{m+1}` together with a
//! nodal chemical potential `mu^{m+1}` by solving a single sparse linear
//! system. All geometry — segment lengths `L_j`, outward normals `n_j`,
//! and the surface-energy matrices `G_j = G(theta_j)` — is frozen at the
//! current polygon, which is what makes the step linear and the energy
//! decay unconditional.
//!
//! In weak form, with mass lumping, the step is: find `(X^{m+1},
//! mu^{m+1})` such that for all nodal test functions `phi` (scalar) and
//! `omega` (vector)
//!
//! ```text
//! ( (X^{m+1} - X^m)/tau , phi n )^h + ( d_s mu^{m+1} , d_s phi )^h = 0
//! ( mu^{m+1} , n . omega )^h       - ( G d_s X^{m+1} , d_s omega )^h = 0
//! ```
//!
//! For open curves attached to the substrate the second equation gains
//! contact-line terms `-1/(eta tau) (x_c^{m+1} - x_c^m)` at the two
//! contact points and a constant substrate-energy source `sigma`, and the
//! vertical coordinates of the contact nodes are eliminated (they stay at
//! `y = 0` exactly).
//!
//! Unknown ordering: all potentials first in node order, then the
//! coordinates interleaved per node `(x_0, y_0, x_1, y_1, ...)`, skipping
//! eliminated entries.

mod solve;

pub use solve::{solve, StepSolution};

use crate::anisotropy::GammaSpec;
use crate::error::{Error, Result};
use crate::geometry::{PolyCurve, SegmentFrame, Topology, Vec2};

/// Mapping from node indices to unknown indices of the step system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    /// Potential unknown of each node.
    pub mu: Vec<usize>,
    /// Horizontal coordinate unknown of each node.
    pub x: Vec<usize>,
    /// Vertical coordinate unknown of each node; `None` for contact nodes
    /// pinned to the substrate.
    pub y: Vec<Option<usize>>,
    /// Total unknown count.
    pub dim: usize,
}

impl DofMap {
    fn new(topology: Topology, n_nodes: usize) -> Self {
        let mu: Vec<usize> = (0..n_nodes).collect();
        let mut x = Vec::with_capacity(n_nodes);
        let mut y = Vec::with_capacity(n_nodes);
        let mut next = n_nodes;
        for i in 0..n_nodes {
            x.push(next);
            next += 1;
            let pinned = topology == Topology::OpenOnSubstrate && (i == 0 || i == n_nodes - 1);
            if pinned {
                y.push(None);
            } else {
                y.push(Some(next));
                next += 1;
            }
        }
        DofMap {
            mu,
            x,
            y,
            dim: next,
        }
    }
}

/// Sparse linear system for one time step, in triplet form. Duplicate
/// entries are additive.
#[derive(Debug, Clone)]
pub struct StepSystem {
    pub topology: Topology,
    pub dof_map: DofMap,
    pub dim: usize,
    /// `(row, column, value)` contributions.
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl StepSystem {
    /// Canonical coordinate-format text dump (sorted, duplicates merged,
    /// full-precision values) followed by the right-hand side; intended
    /// for diffing against independent assemblies.
    pub fn dump_coordinate_text(&self) -> String {
        let merged = self.merged_triplets();
        let mut out = String::new();
        out.push_str(&format!(
            "%% step-system dim {} nnz {}\n",
            self.dim,
            merged.len()
        ));
        for (r, c, v) in &merged {
            out.push_str(&format!("{r} {c} {}\n", crate::io::fmt_full(*v)));
        }
        out.push_str("%% rhs\n");
        for (i, v) in self.rhs.iter().enumerate() {
            out.push_str(&format!("{i} {}\n", crate::io::fmt_full(*v)));
        }
        out
    }

    /// Triplets summed per `(row, column)` position, sorted
    /// lexicographically. Exact-zero sums are kept: they are structural
    /// entries of the stencil.
    pub fn merged_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut sorted = self.triplets.clone();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged
    }
}

struct Assembler {
    system: StepSystem,
}

impl Assembler {
    fn new(topology: Topology, n_nodes: usize) -> Self {
        let dof_map = DofMap::new(topology, n_nodes);
        let dim = dof_map.dim;
        Assembler {
            system: StepSystem {
                topology,
                dof_map,
                dim,
                triplets: Vec::new(),
                rhs: vec![0.0; dim],
            },
        }
    }

    /// Adds an entry, dropping writes to eliminated rows or columns
    /// (their unknowns are identically zero, so no right-hand-side
    /// correction is needed).
    fn add(&mut self, row: Option<usize>, col: Option<usize>, value: f64) {
        if let (Some(r), Some(c)) = (row, col) {
            self.system.triplets.push((r, c, value));
        }
    }

    fn add_rhs(&mut self, row: Option<usize>, value: f64) {
        if let Some(r) = row {
            self.system.rhs[r] += value;
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "time step tau = {tau} must be positive and finite"
        )));
    }
    Ok(())
}

/// Shared per-segment assembly of the two weak equations. `frames` must
/// come from `curve`.
fn assemble_core(
    asm: &mut Assembler,
    curve: &PolyCurve,
    frames: &[SegmentFrame],
    gamma: &GammaSpec,
    tau: f64,
) -> Result<()> {
    let nodes = curve.nodes();
    let dof = asm.system.dof_map.clone();
    let mu = |i: usize| Some(dof.mu[i]);
    let x = |i: usize| Some(dof.x[i]);
    let y = |i: usize| dof.y[i];
    for (j, frame) in frames.iter().enumerate() {
        let (p, q) = curve.segment_endpoints(j);
        let len = frame.length;
        let n = frame.normal;
        let g = gamma.energy_matrix(frame.theta)?;

        // Potential equation. Velocity term: node end values of the
        // lumped product give each endpoint row a `L/(2 tau) n . X_i`
        // coupling, matched on the right-hand side by the current
        // position.
        let w = 0.5 * len / tau;
        for i in [p, q] {
            asm.add(mu(i), x(i), w * n.x);
            asm.add(mu(i), y(i), w * n.y);
            asm.add_rhs(mu(i), w * n.dot(nodes[i]));
        }
        // Potential stiffness: difference quotient squared over the
        // segment.
        let s = 1.0 / len;
        asm.add(mu(p), mu(p), s);
        asm.add(mu(p), mu(q), -s);
        asm.add(mu(q), mu(p), -s);
        asm.add(mu(q), mu(q), s);

        // Coordinate equations. Potential coupling: `L/2 mu_i n` at each
        // endpoint row pair.
        for i in [p, q] {
            asm.add(x(i), mu(i), 0.5 * len * n.x);
            asm.add(y(i), mu(i), 0.5 * len * n.y);
        }
        // Coordinate stiffness: `-1/L * [[1,-1],[-1,1]] (x) G` over the
        // endpoint pair; `G` rows are (gamma, -gamma') and (gamma',
        // gamma).
        let e = g.entries();
        for (row, col, sign) in [(p, p, -1.0), (p, q, 1.0), (q, p, 1.0), (q, q, -1.0)] {
            let f = sign / len;
            asm.add(x(row), x(col), f * e[0][0]);
            asm.add(x(row), y(col), f * e[0][1]);
            asm.add(y(row), x(col), f * e[1][0]);
            asm.add(y(row), y(col), f * e[1][1]);
        }
    }
    Ok(())
}

/// Assembles the step system for a closed curve.
pub fn assemble_closed(curve: &PolyCurve, gamma: &GammaSpec, tau: f64) -> Result<StepSystem> {
    check_tau(tau)?;
    if curve.topology() != Topology::Closed {
        return Err(Error::TopologyMismatch {
            left: curve.topology(),
            right: Topology::Closed,
        });
    }
    let frames = curve.segment_frames()?;
    let mut asm = Assembler::new(Topology::Closed, curve.node_count());
    assemble_core(&mut asm, curve, &frames, gamma, tau)?;
    Ok(asm.system)
}

/// Assembles the step system for an open curve on the substrate, with
/// contact-line mobility `eta` and substrate energy difference `sigma`.
///
/// The contact nodes keep `y = 0` exactly (their vertical unknowns are
/// eliminated); their horizontal rows carry the relaxed contact-line
/// condition `-1/(eta tau) (x_c^{m+1} - x_c^m) -/+ sigma`.
pub fn assemble_open(
    curve: &PolyCurve,
    gamma: &GammaSpec,
    tau: f64,
    sigma: f64,
    eta: f64,
) -> Result<StepSystem> {
    check_tau(tau)?;
    if curve.topology() != Topology::OpenOnSubstrate {
        return Err(Error::TopologyMismatch {
            left: curve.topology(),
            right: Topology::OpenOnSubstrate,
        });
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidMobility(eta));
    }
    let frames = curve.segment_frames()?;
    let mut asm = Assembler::new(Topology::OpenOnSubstrate, curve.node_count());
    assemble_core(&mut asm, curve, &frames, gamma, tau)?;

    let last = curve.node_count() - 1;
    let dof = asm.system.dof_map.clone();
    let c = 1.0 / (eta * tau);
    // Left contact point: test with its horizontal hat has boundary value
    // 1 at the left end, so the substrate source enters with sign +sigma
    // after moving constants to the right-hand side.
    asm.add(Some(dof.x[0]), Some(dof.x[0]), -c);
    asm.add_rhs(Some(dof.x[0]), -c * curve.nodes()[0].x + sigma);
    // Right contact point: boundary value 1 at the right end, source
    // -sigma.
    asm.add(Some(dof.x[last]), Some(dof.x[last]), -c);
    asm.add_rhs(Some(dof.x[last]), -c * curve.nodes()[last].x - sigma);
    Ok(asm.system)
}

/// Checks the solvability conditions for a closed-curve step: no
/// degenerate segments, and at least two non-parallel node-skipping
/// chords `X_{i+1} - X_{i-1}` (a closed polygon whose chords are all
/// parallel leaves a tangential translation undetermined).
pub fn wellposed_closed(curve: &PolyCurve) -> Result<()> {
    if curve.topology() != Topology::Closed {
        return Err(Error::TopologyMismatch {
            left: curve.topology(),
            right: Topology::Closed,
        });
    }
    curve.segment_frames()?; // rejects degenerate segments
    let nodes = curve.nodes();
    let n = nodes.len();
    let chord = |i: usize| nodes[(i + 1) % n] - nodes[(n + i - 1) % n];
    let reference = (0..n).map(chord).find(|c| c.norm() > 0.0);
    let Some(reference) = reference else {
        return Err(Error::IllPosedInitialCurve(
            "all node-skipping chords vanish".into(),
        ));
    };
    for i in 0..n {
        let c = chord(i);
        let cross = (reference.x * c.y - reference.y * c.x).abs();
        if cross > 1e-12 * reference.norm() * c.norm() {
            return Ok(());
        }
    }
    Err(Error::IllPosedInitialCurve(
        "all node-skipping chords are parallel".into(),
    ))
}

/// Checks the solvability conditions for an open-curve step: no
/// degenerate segments, at least two segments, and the two endpoint
/// segments not both parallel to the substrate.
pub fn wellposed_open(curve: &PolyCurve) -> Result<()> {
    if curve.topology() != Topology::OpenOnSubstrate {
        return Err(Error::TopologyMismatch {
            left: curve.topology(),
            right: Topology::OpenOnSubstrate,
        });
    }
    if curve.segment_count() < 2 {
        return Err(Error::IllPosedInitialCurve(
            "open curve needs at least 2 segments".into(),
        ));
    }
    let frames = curve.segment_frames()?;
    let first = &frames[0];
    let last = &frames[frames.len() - 1];
    let horizontal = |f: &SegmentFrame| f.tangent.y.abs() <= 1e-12;
    if horizontal(first) && horizontal(last) {
        return Err(Error::IllPosedInitialCurve(
            "both endpoint segments are parallel to the substrate".into(),
        ));
    }
    Ok(())
}

/// Dispatches to the topology-appropriate well-posedness check.
pub fn wellposed(curve: &PolyCurve) -> Result<()> {
    match curve.topology() {
        Topology::Closed => wellposed_closed(curve),
        Topology::OpenOnSubstrate => wellposed_open(curve),
    }
}

/// Segments adjacent to node `i` (incoming, outgoing) and whether both
/// test components are available there: closed curves and interior nodes
/// test both components; contact nodes only the horizontal one.
fn adjacent_segments(curve: &PolyCurve, i: usize) -> (Option<usize>, Option<usize>, bool) {
    let n_nodes = curve.node_count();
    match curve.topology() {
        Topology::Closed => {
            let n = curve.segment_count();
            (Some((i + n - 1) % n), Some(i), true)
        }
        Topology::OpenOnSubstrate => {
            let incoming = if i > 0 { Some(i - 1) } else { None };
            let outgoing = if i < n_nodes - 1 { Some(i) } else { None };
            let both = incoming.is_some() && outgoing.is_some();
            (incoming, outgoing, both)
        }
    }
}

/// Recovers a nodal field from segment data `d_j` by testing the lumped
/// identity `(value * n, omega)^h = sum_j d_j . (test differences)` with
/// the nodal hats, node by node: each node's value solves a least-squares
/// equation against its weighted normal `w_i = 1/2 (L_in n_in + L_out
/// n_out)`.
fn recover_from_segment_data(
    curve: &PolyCurve,
    frames: &[SegmentFrame],
    segment_data: &[Vec2],
) -> Result<Vec<f64>> {
    let n_nodes = curve.node_count();
    let scale = curve.total_length() / curve.segment_count() as f64;
    let tiny = (1e-12 * scale) * (1e-12 * scale);
    let mut values = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let (incoming, outgoing, both_components) = adjacent_segments(curve, i);
        let mut w = Vec2::ZERO;
        let mut b = Vec2::ZERO;
        if let Some(j) = incoming {
            w = w + frames[j].normal * (0.5 * frames[j].length);
            b = b + segment_data[j];
        }
        if let Some(j) = outgoing {
            w = w + frames[j].normal * (0.5 * frames[j].length);
            b = b - segment_data[j];
        }
        let (num, den) = if both_components {
            (w.dot(b), w.dot(w))
        } else {
            // Contact nodes only admit the horizontal test.
            (w.x * b.x, w.x * w.x)
        };
        if den <= tiny {
            return Err(Error::SingularSystem(format!(
                "recovery weight vanishes at node {i}"
            )));
        }
        values.push(num / den);
    }
    Ok(values)
}

/// Recovers a nodal chemical potential consistent with the coordinate
/// equation on the given curve: `(mu n, omega)^h = (G d_s X, d_s
/// omega)^h` for all nodal vector tests. Used to initialize potentials
/// and to inspect equilibria.
pub fn recover_potential(curve: &PolyCurve, gamma: &GammaSpec) -> Result<Vec<f64>> {
    let frames = curve.segment_frames()?;
    let data: Result<Vec<Vec2>> = frames
        .iter()
        .map(|f| Ok(gamma.energy_matrix(f.theta)?.apply(f.tangent)))
        .collect();
    recover_from_segment_data(curve, &frames, &data?)
}

/// Recovers the discrete curvature: the potential of the isotropic
/// density, `(kappa n, omega)^h = (d_s X, d_s omega)^h`.
pub fn recover_curvature(curve: &PolyCurve) -> Result<Vec<f64>> {
    let frames = curve.segment_frames()?;
    let data: Vec<Vec2> = frames.iter().map(|f| f.tangent).collect();
    recover_from_segment_data(curve, &frames, &data)
}

/// Discrete normal velocity of each node between two consecutive
/// polygons a time `tau` apart, measured along the node's unit averaged
/// normal on the earlier polygon.
pub fn normal_velocity(prev: &PolyCurve, next: &PolyCurve, tau: f64) -> Result<Vec<f64>> {
    check_tau(tau)?;
    if prev.topology() != next.topology() {
        return Err(Error::TopologyMismatch {
            left: prev.topology(),
            right: next.topology(),
        });
    }
    if prev.node_count() != next.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "node counts differ: {} vs {}",
            prev.node_count(),
            next.node_count()
        )));
    }
    let frames = prev.segment_frames()?;
    let n_nodes = prev.node_count();
    let mut velocities = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let (incoming, outgoing, _) = adjacent_segments(prev, i);
        let mut n_avg = Vec2::ZERO;
        if let Some(j) = incoming {
            n_avg = n_avg + frames[j].normal;
        }
        if let Some(j) = outgoing {
            n_avg = n_avg + frames[j].normal;
        }
        let len = n_avg.norm();
        let unit = if len > 1e-14 {
            n_avg * (1.0 / len)
        } else {
            // Antipodal adjacent normals (a needle); fall back to one side.
            frames[incoming.unwrap_or(0)].normal
        };
        let delta = next.nodes()[i] - prev.nodes()[i];
        velocities.push(unit.dot(delta) / tau);
    }
    Ok(velocities)
}
