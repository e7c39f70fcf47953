//! Symmetric-difference distance between the regions enclosed by two
//! curves: `M(c1, c2) = |R1| + |R2| - 2 |R1 ∩ R2|`.
//!
//! The intersection area is computed by exact polygon clipping (the `geo`
//! crate's boolean operations). Inputs are checked for self-intersection
//! first, since the enclosed region of a non-simple loop is ill-defined.

use geo::{Area, BooleanOps, LineString, Polygon};

use super::{PolyCurve, Vec2};
use crate::error::{Error, Result};

/// Symmetric-difference area between the regions enclosed by `c1` and
/// `c2`. Both curves must share a topology; open curves are closed along
/// the substrate. Returns 0 for identical curves; the distance is
/// symmetric and satisfies the triangle inequality.
pub fn manifold_distance(c1: &PolyCurve, c2: &PolyCurve) -> Result<f64> {
    if c1.topology() != c2.topology() {
        return Err(Error::TopologyMismatch {
            left: c1.topology(),
            right: c2.topology(),
        });
    }
    check_simple(c1)?;
    check_simple(c2)?;
    if c1.nodes() == c2.nodes() {
        // Identical node lists enclose the same region; skip the clipper,
        // whose self-intersection leaves last-ulp residue.
        return Ok(0.0);
    }

    let a1 = c1.enclosed_area().abs();
    let a2 = c2.enclosed_area().abs();
    let inter = to_polygon(c1).intersection(&to_polygon(c2)).unsigned_area();
    Ok((a1 + a2 - 2.0 * inter).max(0.0))
}

/// Converts a curve to a clipping polygon. Open curves close implicitly
/// along the substrate (both endpoints have y = 0, so the closing edge is
/// the substrate segment).
fn to_polygon(curve: &PolyCurve) -> Polygon<f64> {
    let coords: Vec<(f64, f64)> = curve.nodes().iter().map(|p| (p.x, p.y)).collect();
    Polygon::new(LineString::from(coords), vec![])
}

/// Rejects curves whose closing polygon has two crossing edges. The test
/// is the standard orientation-based segment intersection check over all
/// non-adjacent edge pairs (quadratic, which is fine at solver mesh
/// sizes).
fn check_simple(curve: &PolyCurve) -> Result<()> {
    let nodes = curve.nodes();
    let n = nodes.len();
    // Edge i runs from node i to node (i+1) % n; for open curves the last
    // edge is the substrate closure.
    let edge = |i: usize| (nodes[i], nodes[(i + 1) % n]);
    for i in 0..n {
        for j in (i + 1)..n {
            // Skip adjacent edges (shared endpoint), including the wrap pair.
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = edge(i);
            let (c, d) = edge(j);
            if segments_intersect(a, b, c, d) {
                return Err(Error::SelfIntersectingCurve { seg_a: i, seg_b: j });
            }
        }
    }
    Ok(())
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}
