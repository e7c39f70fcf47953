//! Polygonal curve geometry: node storage, per-segment frames, enclosed
//! area, interfacial energy, mass-lumped inner products, mesh quality, and
//! arc-length resampling.
//!
//! Conventions used throughout the crate:
//!
//! * The clockwise perpendicular of `v = (x, y)` is `v.perp() = (y, -x)`.
//! * A segment with unit tangent `tau` has unit normal `n = -tau.perp()`,
//!   and inclination `theta = atan2(tau.y, tau.x)` in `(-pi, pi]`, so that
//!   `tau = (cos theta, sin theta)` and `n = (-sin theta, cos theta)`.
//! * The enclosed area of a closed node loop is
//!   `A = 1/2 * sum_j (x_j - x_{j-1}) * (y_j + y_{j-1})`,
//!   which is positive when the loop is traversed with the interior on the
//!   right, i.e. when `n` points outward. Closed constructors reorient the
//!   node order when needed so this area is non-negative.
//! * Curves attached to the substrate (`y = 0`) run from the left contact
//!   point to the right one over the top of the enclosed region; the flat
//!   substrate closure contributes nothing to the area sum.

mod distance;

pub use distance::manifold_distance;

use crate::anisotropy::GammaSpec;
use crate::error::{Error, Result};

/// Relative factor for the segment-degeneracy threshold: a segment is
/// degenerate when its length drops below `DEGENERACY_RELATIVE * L / N`
/// for a curve of total length `L` with `N` segments.
pub const DEGENERACY_RELATIVE: f64 = 1e-12;

/// A plane vector with the small set of operations the solver needs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Clockwise perpendicular `(y, -x)`.
    pub fn perp(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Topology class of a polygonal curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Topology {
    /// A closed loop; node `N-1` connects back to node `0`.
    #[serde(rename = "closed")]
    Closed,
    /// An open arc whose endpoints sit exactly on the substrate line
    /// `y = 0`, enclosing a region together with the substrate.
    #[serde(rename = "open")]
    OpenOnSubstrate,
}

/// Unit tangent/normal frame and length of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentFrame {
    /// Segment length `|h_j| > 0`.
    pub length: f64,
    /// Unit tangent, pointing from the segment's first node to its second.
    pub tangent: Vec2,
    /// Unit outward normal `-tangent.perp()`.
    pub normal: Vec2,
    /// Inclination angle `atan2(tangent.y, tangent.x)` in `(-pi, pi]`.
    pub theta: f64,
}

/// Mesh-quality summary of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshMetrics {
    pub min_length: f64,
    pub max_length: f64,
    /// Mesh ratio `max_length / min_length >= 1`.
    pub ratio: f64,
}

/// A scalar- or vector-valued sampled field over a curve, either one value
/// per node (piecewise linear) or one value per segment (piecewise
/// constant). Used by [`PolyCurve::mass_lumped_inner`].
#[derive(Debug, Clone, Copy)]
pub enum Field<'a> {
    NodalScalar(&'a [f64]),
    SegmentScalar(&'a [f64]),
    NodalVector(&'a [Vec2]),
    SegmentVector(&'a [Vec2]),
}

impl<'a> Field<'a> {
    fn len(&self) -> usize {
        match self {
            Field::NodalScalar(v) => v.len(),
            Field::SegmentScalar(v) => v.len(),
            Field::NodalVector(v) => v.len(),
            Field::SegmentVector(v) => v.len(),
        }
    }

    fn is_nodal(&self) -> bool {
        matches!(self, Field::NodalScalar(_) | Field::NodalVector(_))
    }

    fn is_vector(&self) -> bool {
        matches!(self, Field::NodalVector(_) | Field::SegmentVector(_))
    }
}

/// A polygonal curve: an ordered list of nodes plus a topology tag.
///
/// Invariants established at construction:
/// * all coordinates are finite;
/// * every segment is longer than the degeneracy threshold;
/// * closed curves have at least 3 nodes and non-negative enclosed area
///   (the constructor reverses the node order when the input loop is
///   oriented the other way, and logs that it did);
/// * open curves have at least 2 nodes, endpoints exactly on `y = 0`, and
///   left contact at or before the right contact (`x_0 <= x_last`).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    topology: Topology,
    nodes: Vec<Vec2>,
}

impl PolyCurve {
    /// Builds a validated closed curve, reorienting so the enclosed area is
    /// non-negative.
    pub fn closed(nodes: Vec<Vec2>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidCurve(format!(
                "closed curve needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        let mut curve = PolyCurve {
            topology: Topology::Closed,
            nodes,
        };
        curve.check_finite()?;
        curve.check_segments()?;
        if curve.enclosed_area() < 0.0 {
            curve.nodes.reverse();
            log::debug!("closed curve reoriented to make the enclosed area non-negative");
        }
        Ok(curve)
    }

    /// Builds a validated open curve attached to the substrate.
    pub fn open_on_substrate(nodes: Vec<Vec2>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "open curve needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        let first = nodes[0];
        let last = nodes[nodes.len() - 1];
        if first.y != 0.0 || last.y != 0.0 {
            return Err(Error::InvalidCurve(format!(
                "open-curve endpoints must lie exactly on the substrate y = 0 \
                 (got y = {:e} and y = {:e})",
                first.y, last.y
            )));
        }
        if first.x > last.x {
            return Err(Error::InvalidCurve(format!(
                "left contact point x = {} lies right of right contact point x = {}",
                first.x, last.x
            )));
        }
        let curve = PolyCurve {
            topology: Topology::OpenOnSubstrate,
            nodes,
        };
        curve.check_finite()?;
        curve.check_segments()?;
        Ok(curve)
    }

    /// Builds a curve without validating invariants. Intended for solver
    /// internals and tests that need to construct intermediate states the
    /// validating constructors would reject; most callers should use
    /// [`PolyCurve::closed`] or [`PolyCurve::open_on_substrate`].
    pub fn from_nodes_unchecked(topology: Topology, nodes: Vec<Vec2>) -> Self {
        PolyCurve { topology, nodes }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of curve segments: equals the node count for closed curves
    /// (the wrap-around segment included), node count minus one for open.
    pub fn segment_count(&self) -> usize {
        match self.topology {
            Topology::Closed => self.nodes.len(),
            Topology::OpenOnSubstrate => self.nodes.len() - 1,
        }
    }

    /// Endpoints of segment `j`: `(j, j+1)` with wrap-around for closed
    /// curves.
    pub fn segment_endpoints(&self, j: usize) -> (usize, usize) {
        debug_assert!(j < self.segment_count());
        match self.topology {
            Topology::Closed => (j, (j + 1) % self.nodes.len()),
            Topology::OpenOnSubstrate => (j, j + 1),
        }
    }

    /// x-coordinates of the two contact points of an open curve.
    pub fn contact_points(&self) -> Option<(f64, f64)> {
        match self.topology {
            Topology::Closed => None,
            Topology::OpenOnSubstrate => {
                Some((self.nodes[0].x, self.nodes[self.nodes.len() - 1].x))
            }
        }
    }

    pub fn segment_vector(&self, j: usize) -> Vec2 {
        let (p, q) = self.segment_endpoints(j);
        self.nodes[q] - self.nodes[p]
    }

    pub fn segment_length(&self, j: usize) -> f64 {
        self.segment_vector(j).norm()
    }

    pub fn total_length(&self) -> f64 {
        (0..self.segment_count()).map(|j| self.segment_length(j)).sum()
    }

    /// Degeneracy threshold for this curve: `1e-12` times the mean segment
    /// length.
    pub fn degeneracy_threshold(&self) -> f64 {
        DEGENERACY_RELATIVE * self.total_length() / self.segment_count() as f64
    }

    fn check_finite(&self) -> Result<()> {
        for (i, p) in self.nodes.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidCurve(format!(
                    "node {i} has non-finite coordinates ({}, {})",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }

    fn check_segments(&self) -> Result<()> {
        let threshold = self.degeneracy_threshold();
        for j in 0..self.segment_count() {
            let length = self.segment_length(j);
            if !(length > threshold) {
                return Err(Error::DegenerateSegment {
                    index: j,
                    length,
                    threshold,
                });
            }
        }
        Ok(())
    }

    /// Per-segment frames (length, unit tangent, unit outward normal,
    /// inclination angle). Fails with [`Error::DegenerateSegment`] if any
    /// segment has collapsed below the degeneracy threshold.
    pub fn segment_frames(&self) -> Result<Vec<SegmentFrame>> {
        let threshold = self.degeneracy_threshold();
        (0..self.segment_count())
            .map(|j| {
                let h = self.segment_vector(j);
                let length = h.norm();
                if !(length > threshold) {
                    return Err(Error::DegenerateSegment {
                        index: j,
                        length,
                        threshold,
                    });
                }
                let tangent = h * (1.0 / length);
                Ok(SegmentFrame {
                    length,
                    tangent,
                    normal: -tangent.perp(),
                    theta: tangent.y.atan2(tangent.x),
                })
            })
            .collect()
    }

    /// Signed enclosed area `1/2 * sum_j (x_j - x_{j-1}) (y_j + y_{j-1})`.
    ///
    /// Positive for the orientation convention of this crate (interior on
    /// the right of the traversal, outward normals). For open curves the
    /// sum runs over the curve segments only; the substrate closure along
    /// `y = 0` contributes zero.
    pub fn enclosed_area(&self) -> f64 {
        let mut area = 0.0;
        for j in 0..self.segment_count() {
            let (p, q) = self.segment_endpoints(j);
            area += (self.nodes[q].x - self.nodes[p].x) * (self.nodes[q].y + self.nodes[p].y);
        }
        0.5 * area
    }

    /// Area centroid of the enclosed region (for open curves: the region
    /// bounded by the curve and the substrate).
    pub fn centroid(&self) -> Result<Vec2> {
        // Standard polygon centroid; the substrate closure of an open curve
        // contributes zero to every term because y = 0 at both contacts.
        let mut a2 = 0.0; // twice the standard signed area
        let mut cx = 0.0;
        let mut cy = 0.0;
        for j in 0..self.segment_count() {
            let (p, q) = self.segment_endpoints(j);
            let cross = self.nodes[p].x * self.nodes[q].y - self.nodes[q].x * self.nodes[p].y;
            a2 += cross;
            cx += (self.nodes[p].x + self.nodes[q].x) * cross;
            cy += (self.nodes[p].y + self.nodes[q].y) * cross;
        }
        if a2.abs() < 1e-300 {
            return Err(Error::InvalidCurve(
                "centroid undefined: enclosed area is zero".into(),
            ));
        }
        Ok(Vec2::new(cx / (3.0 * a2), cy / (3.0 * a2)))
    }

    /// Returns a copy translated by `offset`.
    ///
    /// For open curves the offset must keep the endpoints on the substrate,
    /// i.e. `offset.y` must be exactly zero.
    pub fn translated(&self, offset: Vec2) -> Result<PolyCurve> {
        if self.topology == Topology::OpenOnSubstrate && offset.y != 0.0 {
            return Err(Error::InvalidCurve(
                "open curves can only be translated along the substrate".into(),
            ));
        }
        Ok(PolyCurve {
            topology: self.topology,
            nodes: self.nodes.iter().map(|&p| p + offset).collect(),
        })
    }

    /// Discrete interfacial energy.
    ///
    /// Closed curves: `W = sum_j |h_j| gamma(theta_j)` (the `sigma`
    /// argument is ignored). Open curves additionally account for the
    /// substrate energy difference: `W = sum_j |h_j| gamma(theta_j) -
    /// sigma * (x_r - x_l)`.
    pub fn interface_energy(&self, gamma: &GammaSpec, sigma: f64) -> Result<f64> {
        let mut energy = 0.0;
        for frame in self.segment_frames()? {
            energy += frame.length * gamma.evaluate(frame.theta)?.value;
        }
        if let Some((x_l, x_r)) = self.contact_points() {
            energy -= sigma * (x_r - x_l);
        }
        Ok(energy)
    }

    /// Mass-lumped inner product
    /// `(u, v)^h = 1/2 * sum_j |h_j| [ (u.v)(right end of j) + (u.v)(left end of j) ]`,
    /// where nodal fields are evaluated at the segment's end nodes and
    /// segmentwise fields contribute their constant value at both ends.
    ///
    /// `u` and `v` must both be scalar or both vector, with lengths
    /// matching the curve's node count (nodal) or segment count
    /// (segmentwise).
    pub fn mass_lumped_inner(&self, u: Field<'_>, v: Field<'_>) -> Result<f64> {
        if u.is_vector() != v.is_vector() {
            return Err(Error::DimensionMismatch(
                "cannot pair a scalar field with a vector field".into(),
            ));
        }
        for (name, f) in [("u", &u), ("v", &v)] {
            let expected = if f.is_nodal() {
                self.node_count()
            } else {
                self.segment_count()
            };
            if f.len() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "field {name} has {} entries, curve expects {expected}",
                    f.len()
                )));
            }
        }

        // Pointwise product of the two fields at segment j's left (p) or
        // right (q) end node.
        let value_at = |f: &Field<'_>, j: usize, node: usize| -> (f64, f64) {
            match f {
                Field::NodalScalar(vals) => (vals[node], 0.0),
                Field::SegmentScalar(vals) => (vals[j], 0.0),
                Field::NodalVector(vals) => (vals[node].x, vals[node].y),
                Field::SegmentVector(vals) => (vals[j].x, vals[j].y),
            }
        };

        let mut total = 0.0;
        for j in 0..self.segment_count() {
            let (p, q) = self.segment_endpoints(j);
            let length = self.segment_length(j);
            let mut seg = 0.0;
            for node in [q, p] {
                let (ux, uy) = value_at(&u, j, node);
                let (vx, vy) = value_at(&v, j, node);
                seg += ux * vx + uy * vy;
            }
            total += length * seg;
        }
        Ok(0.5 * total)
    }

    /// Minimum/maximum segment length and their ratio.
    pub fn mesh_metrics(&self) -> Result<MeshMetrics> {
        let frames = self.segment_frames()?;
        let mut min_length = f64::INFINITY;
        let mut max_length = 0.0_f64;
        for f in &frames {
            min_length = min_length.min(f.length);
            max_length = max_length.max(f.length);
        }
        Ok(MeshMetrics {
            min_length,
            max_length,
            ratio: max_length / min_length,
        })
    }

    /// Resamples the curve to `n` segments with nodes equidistributed in
    /// arc length along the source polyline.
    ///
    /// Node `j` of the result sits at arc length `j * L / n` along `self`
    /// (total length `L`). Closed curves keep node 0 fixed; open curves
    /// keep both endpoints exactly. Arc positions that fall on a source
    /// node (within `1e-12 * L`) snap to that node, so resampling an
    /// already-uniform curve at its own resolution reproduces it exactly.
    pub fn arc_length_interpolate(&self, n: usize) -> Result<PolyCurve> {
        let min_segments = match self.topology {
            Topology::Closed => 3,
            Topology::OpenOnSubstrate => 1,
        };
        if n < min_segments {
            return Err(Error::InvalidCurve(format!(
                "cannot resample {:?} curve to {n} segments (minimum {min_segments})",
                self.topology
            )));
        }

        // Cumulative arc-length table over source nodes: cumulative[k] is
        // the arc length from node 0 to node k along the polyline.
        let segs = self.segment_count();
        let mut cumulative = Vec::with_capacity(segs + 1);
        cumulative.push(0.0);
        for j in 0..segs {
            cumulative.push(cumulative[j] + self.segment_length(j));
        }
        let total = cumulative[segs];
        let snap = 1e-12 * total;

        let out_nodes = match self.topology {
            Topology::Closed => n,
            Topology::OpenOnSubstrate => n + 1,
        };
        let mut nodes = Vec::with_capacity(out_nodes);
        let mut k = 0usize; // source segment cursor, advances monotonically
        for j in 0..out_nodes {
            let s = if j == out_nodes - 1 && self.topology == Topology::OpenOnSubstrate {
                total // keep the right endpoint exact
            } else {
                total * j as f64 / n as f64
            };
            while k + 1 < segs && cumulative[k + 1] < s - snap {
                k += 1;
            }
            let node = if (s - cumulative[k]).abs() <= snap {
                self.nodes[k]
            } else if (s - cumulative[k + 1]).abs() <= snap {
                let (_, q) = self.segment_endpoints(k);
                self.nodes[q]
            } else {
                let (p, q) = self.segment_endpoints(k);
                let t = (s - cumulative[k]) / (cumulative[k + 1] - cumulative[k]);
                self.nodes[p] + (self.nodes[q] - self.nodes[p]) * t
            };
            nodes.push(node);
        }

        match self.topology {
            Topology::Closed => PolyCurve::closed(nodes),
            Topology::OpenOnSubstrate => PolyCurve::open_on_substrate(nodes),
        }
    }
}

#[cfg(test)]
mod tests;
