//! Unit and property tests for the curve geometry primitives.
//!
//! Oracle values are frozen from hand derivations on shapes simple
//! enough to compute exactly (squares, rectangles, triangle roofs,
//! regular polygons); the symmetric-difference distance is additionally
//! cross-checked against a seeded Monte Carlo estimate that shares no
//! code with the polygon-clipping route.

use std::f64::consts::PI;

use super::*;
use crate::anisotropy::GammaSpec;

/// Tolerance for identities that only accumulate rounding error.
const ROUNDING_TOL: f64 = 1e-12;

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

/// Unit square stored in the crate's positive orientation (interior on
/// the right of travel): left edge up, top edge right, and so on.
fn unit_square() -> PolyCurve {
    PolyCurve::closed(vec![v(0.0, 0.0), v(0.0, 1.0), v(1.0, 1.0), v(1.0, 0.0)]).unwrap()
}

/// Open "roof" over the substrate: contacts at x = -1 and x = 1, apex at
/// (0, 1); both segments have length sqrt(2).
fn roof() -> PolyCurve {
    PolyCurve::open_on_substrate(vec![v(-1.0, 0.0), v(0.0, 1.0), v(1.0, 0.0)]).unwrap()
}

#[test]
fn perp_is_the_clockwise_perpendicular() {
    assert_eq!(v(1.0, 0.0).perp(), v(0.0, -1.0));
    assert_eq!(v(0.0, 1.0).perp(), v(1.0, 0.0));
    assert_eq!(v(2.0, 3.0).dot(v(2.0, 3.0).perp()), 0.0);
}

#[test]
fn unit_square_frames_match_hand_derivation() {
    let frames = unit_square().segment_frames().unwrap();
    assert_eq!(frames.len(), 4);
    // Left edge travels upward: theta = pi/2, outward normal (-1, 0).
    assert!((frames[0].theta - PI / 2.0).abs() < ROUNDING_TOL);
    assert_eq!(frames[0].normal, v(-1.0, 0.0));
    // Top edge travels right: theta = 0, outward normal (0, 1).
    assert_eq!(frames[1].theta, 0.0);
    assert_eq!(frames[1].normal, v(0.0, 1.0));
    // Right edge travels downward: theta = -pi/2, outward normal (1, 0).
    assert!((frames[2].theta + PI / 2.0).abs() < ROUNDING_TOL);
    assert_eq!(frames[2].normal, v(1.0, 0.0));
    // Bottom edge travels left: theta = pi, outward normal (0, -1).
    assert_eq!(frames[3].theta, PI);
    assert_eq!(frames[3].normal, v(0.0, -1.0));
    for f in &frames {
        assert_eq!(f.length, 1.0);
        assert!((f.tangent.norm() - 1.0).abs() < ROUNDING_TOL);
        assert_eq!(f.normal, -f.tangent.perp());
    }
}

#[test]
fn closed_constructor_reorients_a_backwards_loop() {
    // Counter-clockwise input encloses area -1 under the crate's signed
    // formula; the constructor must flip it.
    let curve =
        PolyCurve::closed(vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)]).unwrap();
    assert_eq!(curve.enclosed_area(), 1.0);
    assert_eq!(
        curve.nodes(),
        &[v(0.0, 1.0), v(1.0, 1.0), v(1.0, 0.0), v(0.0, 0.0)]
    );
}

#[test]
fn closed_constructor_rejects_too_few_nodes() {
    let err = PolyCurve::closed(vec![v(0.0, 0.0), v(1.0, 0.0)]).unwrap_err();
    assert!(matches!(err, Error::InvalidCurve(_)), "got {err:?}");
}

#[test]
fn constructors_reject_degenerate_segments() {
    let err = PolyCurve::closed(vec![v(0.0, 0.0), v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)])
        .unwrap_err();
    assert!(
        matches!(err, Error::DegenerateSegment { index: 0, .. }),
        "got {err:?}"
    );
}

#[test]
fn constructors_reject_non_finite_nodes() {
    let err =
        PolyCurve::closed(vec![v(0.0, 0.0), v(f64::NAN, 1.0), v(1.0, 0.0)]).unwrap_err();
    assert!(matches!(err, Error::InvalidCurve(_)), "got {err:?}");
}

#[test]
fn open_constructor_requires_substrate_contact() {
    let err =
        PolyCurve::open_on_substrate(vec![v(-1.0, 0.5), v(0.0, 1.0), v(1.0, 0.0)]).unwrap_err();
    assert!(matches!(err, Error::InvalidCurve(_)), "got {err:?}");
}

#[test]
fn open_constructor_requires_left_before_right_contact() {
    let err =
        PolyCurve::open_on_substrate(vec![v(1.0, 0.0), v(0.0, 1.0), v(-1.0, 0.0)]).unwrap_err();
    assert!(matches!(err, Error::InvalidCurve(_)), "got {err:?}");
}

#[test]
fn segment_counts_differ_by_topology() {
    assert_eq!(unit_square().segment_count(), 4);
    assert_eq!(unit_square().node_count(), 4);
    assert_eq!(roof().segment_count(), 2);
    assert_eq!(roof().node_count(), 3);
    assert_eq!(roof().contact_points(), Some((-1.0, 1.0)));
    assert_eq!(unit_square().contact_points(), None);
}

#[test]
fn enclosed_area_of_simple_shapes() {
    assert_eq!(unit_square().enclosed_area(), 1.0);
    let rect = PolyCurve::closed(vec![
        v(-2.0, -0.5),
        v(-2.0, 0.5),
        v(2.0, 0.5),
        v(2.0, -0.5),
    ])
    .unwrap();
    assert_eq!(rect.enclosed_area(), 4.0);
    assert_eq!(rect.total_length(), 10.0);
    // Open 2x1 box over the substrate: the substrate closure is implicit.
    let box_open = PolyCurve::open_on_substrate(vec![
        v(-1.0, 0.0),
        v(-1.0, 1.0),
        v(1.0, 1.0),
        v(1.0, 0.0),
    ])
    .unwrap();
    assert_eq!(box_open.enclosed_area(), 2.0);
    assert_eq!(roof().enclosed_area(), 1.0);
}

#[test]
fn enclosed_area_converges_to_the_half_disc() {
    // Upper half of the unit circle with 256 chords; the polygonal area
    // deficit is O(n^-2) and stays well below 1e-4 at this resolution.
    let n = 256;
    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = PI * (1.0 - i as f64 / n as f64);
        let y = if i == 0 || i == n { 0.0 } else { t.sin() };
        nodes.push(v(t.cos(), y));
    }
    let half_disc = PolyCurve::open_on_substrate(nodes).unwrap();
    assert!(
        (half_disc.enclosed_area() - PI / 2.0).abs() < 1e-4,
        "area {} too far from pi/2",
        half_disc.enclosed_area()
    );
}

#[test]
fn centroid_of_square_and_roof() {
    let c = unit_square().centroid().unwrap();
    assert!((c.x - 0.5).abs() < ROUNDING_TOL && (c.y - 0.5).abs() < ROUNDING_TOL);
    // Roof = triangle (-1,0), (0,1), (1,0): centroid (0, 1/3).
    let c = roof().centroid().unwrap();
    assert!(c.x.abs() < ROUNDING_TOL && (c.y - 1.0 / 3.0).abs() < ROUNDING_TOL);
}

#[test]
fn translation_moves_every_node_and_respects_the_substrate() {
    let moved = unit_square().translated(v(2.0, -3.0)).unwrap();
    assert_eq!(moved.nodes()[0], v(2.0, -3.0));
    assert_eq!(moved.enclosed_area(), 1.0);

    let slid = roof().translated(v(5.0, 0.0)).unwrap();
    assert_eq!(slid.contact_points(), Some((4.0, 6.0)));
    let err = roof().translated(v(0.0, 0.1)).unwrap_err();
    assert!(matches!(err, Error::InvalidCurve(_)), "got {err:?}");
}

#[test]
fn interface_energy_is_the_perimeter_for_the_isotropic_density() {
    let energy = unit_square()
        .interface_energy(&GammaSpec::Isotropic, 0.0)
        .unwrap();
    assert!((energy - 4.0).abs() < ROUNDING_TOL);
}

#[test]
fn interface_energy_weights_each_edge_by_its_orientation() {
    // gamma = 1 + (1/17) cos(4 theta) evaluates to 18/17 on all four
    // axis-aligned edges of the square.
    let gamma = GammaSpec::KFold {
        beta: 1.0 / 17.0,
        k: 4,
        theta0: 0.0,
    };
    let energy = unit_square().interface_energy(&gamma, 0.0).unwrap();
    assert!(
        (energy - 72.0 / 17.0).abs() < ROUNDING_TOL,
        "got {energy}, want 72/17"
    );
}

#[test]
fn interface_energy_of_open_curves_subtracts_the_substrate_term() {
    // Roof under the isotropic density: curve part 2 sqrt(2), substrate
    // term -sigma * (x_r - x_l) = -2 sigma.
    let energy = roof().interface_energy(&GammaSpec::Isotropic, 0.5).unwrap();
    assert!(
        (energy - (2.0 * 2.0_f64.sqrt() - 1.0)).abs() < ROUNDING_TOL,
        "got {energy}"
    );
    // sigma is ignored for closed curves.
    let closed = unit_square()
        .interface_energy(&GammaSpec::Isotropic, 123.0)
        .unwrap();
    assert!((closed - 4.0).abs() < ROUNDING_TOL);
}

#[test]
fn mass_lumped_inner_of_constants_is_the_total_length() {
    let square = unit_square();
    let ones = vec![1.0; 4];
    let ip = square
        .mass_lumped_inner(Field::NodalScalar(&ones), Field::NodalScalar(&ones))
        .unwrap();
    assert!((ip - square.total_length()).abs() < ROUNDING_TOL);

    let r = roof();
    let ones = vec![1.0; 3];
    let ip = r
        .mass_lumped_inner(Field::NodalScalar(&ones), Field::NodalScalar(&ones))
        .unwrap();
    assert!((ip - r.total_length()).abs() < ROUNDING_TOL);
}

#[test]
fn mass_lumped_inner_matches_hand_sum_for_mixed_fields() {
    // Square with unit edges, nodal u = (1, 2, 3, 4), segmentwise v = 1:
    // (u, v)^h = 1/2 sum_j L_j (u_p + u_q) = (3 + 5 + 7 + 5) / 2 = 10.
    let square = unit_square();
    let u = vec![1.0, 2.0, 3.0, 4.0];
    let v_seg = vec![1.0; 4];
    let ip = square
        .mass_lumped_inner(Field::NodalScalar(&u), Field::SegmentScalar(&v_seg))
        .unwrap();
    assert!((ip - 10.0).abs() < ROUNDING_TOL);
    // Same answer when the constant field is given nodally.
    let v_nodal = vec![1.0; 4];
    let ip = square
        .mass_lumped_inner(Field::NodalScalar(&u), Field::NodalScalar(&v_nodal))
        .unwrap();
    assert!((ip - 10.0).abs() < ROUNDING_TOL);
}

#[test]
fn mass_lumped_inner_pairs_vector_fields_componentwise() {
    // Segmentwise outward normals against themselves: unit vectors, so
    // the product is again the total length.
    let square = unit_square();
    let normals: Vec<Vec2> = square
        .segment_frames()
        .unwrap()
        .iter()
        .map(|f| f.normal)
        .collect();
    let ip = square
        .mass_lumped_inner(Field::SegmentVector(&normals), Field::SegmentVector(&normals))
        .unwrap();
    assert!((ip - 4.0).abs() < ROUNDING_TOL);
}

#[test]
fn mass_lumped_inner_rejects_mismatched_fields() {
    let square = unit_square();
    let s = vec![1.0; 4];
    let w = vec![Vec2::ZERO; 4];
    let err = square
        .mass_lumped_inner(Field::NodalScalar(&s), Field::NodalVector(&w))
        .unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch(_)), "got {err:?}");
    let short = vec![1.0; 3];
    let err = square
        .mass_lumped_inner(Field::NodalScalar(&short), Field::NodalScalar(&s))
        .unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch(_)), "got {err:?}");
}

#[test]
fn mesh_metrics_report_exact_ratios_on_rectangles() {
    let m = unit_square().mesh_metrics().unwrap();
    assert_eq!((m.min_length, m.max_length, m.ratio), (1.0, 1.0, 1.0));
    let rect = PolyCurve::closed(vec![
        v(-2.0, -0.5),
        v(-2.0, 0.5),
        v(2.0, 0.5),
        v(2.0, -0.5),
    ])
    .unwrap();
    let m = rect.mesh_metrics().unwrap();
    assert_eq!((m.min_length, m.max_length, m.ratio), (1.0, 4.0, 4.0));
}

#[test]
fn resampling_a_rectangle_places_nodes_at_exact_arc_positions() {
    // Perimeter 10 resampled to 10 unit segments: nodes walk the corners
    // and edge midpoints exactly.
    let rect = PolyCurve::closed(vec![
        v(-2.0, -0.5),
        v(-2.0, 0.5),
        v(2.0, 0.5),
        v(2.0, -0.5),
    ])
    .unwrap();
    let fine = rect.arc_length_interpolate(10).unwrap();
    let expected = [
        v(-2.0, -0.5),
        v(-2.0, 0.5),
        v(-1.0, 0.5),
        v(0.0, 0.5),
        v(1.0, 0.5),
        v(2.0, 0.5),
        v(2.0, -0.5),
        v(1.0, -0.5),
        v(0.0, -0.5),
        v(-1.0, -0.5),
    ];
    assert_eq!(fine.nodes(), &expected);
    let m = fine.mesh_metrics().unwrap();
    assert_eq!(m.ratio, 1.0);
}

#[test]
fn resampling_a_uniform_curve_at_its_own_resolution_is_the_identity() {
    let rect = PolyCurve::closed(vec![
        v(-2.0, -0.5),
        v(-2.0, 0.5),
        v(2.0, 0.5),
        v(2.0, -0.5),
    ])
    .unwrap();
    let fine = rect.arc_length_interpolate(10).unwrap();
    let again = fine.arc_length_interpolate(10).unwrap();
    assert_eq!(fine.nodes(), again.nodes());
}

#[test]
fn resampling_a_regular_polygon_snaps_to_its_vertices() {
    // A regular 4096-gon resampled to 64 segments must return every 64th
    // vertex bitwise: the target arc positions coincide with source
    // nodes and the snapping tolerance takes over.
    let m = 4096;
    let source: Vec<Vec2> = (0..m)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / m as f64;
            v(t.cos(), -t.sin())
        })
        .collect();
    let circle = PolyCurve::closed(source.clone()).unwrap();
    let coarse = circle.arc_length_interpolate(64).unwrap();
    for (j, node) in coarse.nodes().iter().enumerate() {
        assert_eq!(*node, source[j * 64], "node {j} did not snap");
    }
}

#[test]
fn resampling_an_open_curve_keeps_the_contacts_exact() {
    let resampled = roof().arc_length_interpolate(4).unwrap();
    assert_eq!(resampled.node_count(), 5);
    // Contacts and the apex (which snaps onto a source node) are exact;
    // the two slope midpoints carry interpolation rounding.
    assert_eq!(resampled.nodes()[0], v(-1.0, 0.0));
    assert_eq!(resampled.nodes()[4], v(1.0, 0.0));
    assert_eq!(resampled.nodes()[2], v(0.0, 1.0));
    for (node, want) in [
        (resampled.nodes()[1], v(-0.5, 0.5)),
        (resampled.nodes()[3], v(0.5, 0.5)),
    ] {
        assert!(
            (node.x - want.x).abs() < ROUNDING_TOL && (node.y - want.y).abs() < ROUNDING_TOL,
            "midpoint {node:?} vs {want:?}"
        );
    }
}

#[test]
fn resampling_rejects_too_few_segments() {
    let err = unit_square().arc_length_interpolate(2).unwrap_err();
    assert!(matches!(err, Error::InvalidCurve(_)), "got {err:?}");
}

#[test]
fn topology_serializes_as_closed_and_open() {
    assert_eq!(serde_json::to_string(&Topology::Closed).unwrap(), "\"closed\"");
    assert_eq!(
        serde_json::to_string(&Topology::OpenOnSubstrate).unwrap(),
        "\"open\""
    );
    let back: Topology = serde_json::from_str("\"open\"").unwrap();
    assert_eq!(back, Topology::OpenOnSubstrate);
}

mod distance {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distance_between_identical_curves_is_zero() {
        let d = manifold_distance(&unit_square(), &unit_square()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn distance_between_disjoint_squares_is_the_area_sum() {
        let far = unit_square().translated(v(3.0, 0.0)).unwrap();
        let d = manifold_distance(&unit_square(), &far).unwrap();
        assert!((d - 2.0).abs() < ROUNDING_TOL, "got {d}");
    }

    #[test]
    fn distance_accounts_for_partial_overlap() {
        // Shift by half an edge: overlap 1/2, distance 1 + 1 - 2/2 = 1.
        let shifted = unit_square().translated(v(0.5, 0.0)).unwrap();
        let d = manifold_distance(&unit_square(), &shifted).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn distance_of_nested_regions_is_the_area_difference() {
        let big = PolyCurve::closed(vec![
            v(-0.5, -0.5),
            v(-0.5, 1.5),
            v(1.5, 1.5),
            v(1.5, -0.5),
        ])
        .unwrap();
        let d = manifold_distance(&unit_square(), &big).unwrap();
        assert!((d - 3.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn open_curves_close_along_the_substrate() {
        let near = roof();
        let far = roof().translated(v(10.0, 0.0)).unwrap();
        let d = manifold_distance(&near, &far).unwrap();
        assert!((d - 2.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn distance_rejects_mismatched_topologies() {
        let err = manifold_distance(&unit_square(), &roof()).unwrap_err();
        assert!(matches!(err, Error::TopologyMismatch { .. }), "got {err:?}");
    }

    #[test]
    fn distance_rejects_self_intersecting_loops() {
        // Bowtie: zero signed area, passes construction, but its edges
        // cross.
        let bowtie = PolyCurve::closed(vec![
            v(0.0, 0.0),
            v(1.0, 1.0),
            v(1.0, 0.0),
            v(0.0, 1.0),
        ])
        .unwrap();
        let err = manifold_distance(&bowtie, &unit_square()).unwrap_err();
        assert!(
            matches!(err, Error::SelfIntersectingCurve { .. }),
            "got {err:?}"
        );
    }

    /// Monte Carlo cross-check of the clipping route: sample the bounding
    /// box uniformly and classify points against both regions with a
    /// crossing-number test. Seeded, so the expected estimate is
    /// deterministic.
    #[test]
    fn distance_agrees_with_a_monte_carlo_estimate() {
        let a = unit_square();
        let b = PolyCurve::closed(vec![v(0.4, -0.2), v(0.6, 1.1), v(1.5, 0.3)]).unwrap();
        let exact = manifold_distance(&a, &b).unwrap();

        let inside = |curve: &PolyCurve, p: Vec2| -> bool {
            let nodes = curve.nodes();
            let n = nodes.len();
            let mut crossings = 0;
            for i in 0..n {
                let (s, e) = (nodes[i], nodes[(i + 1) % n]);
                if (s.y > p.y) != (e.y > p.y) {
                    let t = (p.y - s.y) / (e.y - s.y);
                    if s.x + t * (e.x - s.x) > p.x {
                        crossings += 1;
                    }
                }
            }
            crossings % 2 == 1
        };

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
        let (lo, hi) = (v(-0.5, -0.5), v(2.0, 1.5));
        let box_area = (hi.x - lo.x) * (hi.y - lo.y);
        let samples = 200_000;
        let mut hits = 0usize;
        for _ in 0..samples {
            let p = v(
                rng.random_range(lo.x..hi.x),
                rng.random_range(lo.y..hi.y),
            );
            if inside(&a, p) != inside(&b, p) {
                hits += 1;
            }
        }
        let estimate = box_area * hits as f64 / samples as f64;
        // Binomial noise: sigma = box_area * sqrt(p (1-p) / n) < 0.006;
        // allow five sigmas.
        assert!(
            (estimate - exact).abs() < 0.03,
            "Monte Carlo {estimate} vs clipped {exact}"
        );
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    /// Star-shaped polygon from sorted angles and per-vertex radii:
    /// always simple, never degenerate for the generated ranges.
    fn star_polygon(radii: Vec<f64>) -> PolyCurve {
        let n = radii.len();
        let nodes: Vec<Vec2> = radii
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let t = 2.0 * PI * i as f64 / n as f64;
                // Negative angle direction keeps the stored orientation.
                v(r * t.cos(), -r * t.sin())
            })
            .collect();
        PolyCurve::closed(nodes).unwrap()
    }

    fn radii() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.5..2.0_f64, 4..12)
    }

    proptest! {
        #[test]
        fn mass_lumped_inner_is_symmetric_and_positive(
            radii in radii(),
            seed_values in proptest::collection::vec(-10.0..10.0_f64, 12),
        ) {
            let curve = star_polygon(radii);
            let n = curve.node_count();
            let u: Vec<f64> = seed_values.iter().cycle().take(n).cloned().collect();
            let w: Vec<f64> = seed_values.iter().rev().cycle().take(n).cloned().collect();
            let uv = curve
                .mass_lumped_inner(Field::NodalScalar(&u), Field::NodalScalar(&w))
                .unwrap();
            let vu = curve
                .mass_lumped_inner(Field::NodalScalar(&w), Field::NodalScalar(&u))
                .unwrap();
            prop_assert!((uv - vu).abs() <= 1e-12 * (1.0 + uv.abs()));
            let uu = curve
                .mass_lumped_inner(Field::NodalScalar(&u), Field::NodalScalar(&u))
                .unwrap();
            prop_assert!(uu >= 0.0);
        }

        #[test]
        fn manifold_distance_is_a_symmetric_premetric(
            ra in radii(),
            rb in radii(),
            rc in radii(),
        ) {
            let (a, b, c) = (star_polygon(ra), star_polygon(rb), star_polygon(rc));
            let ab = manifold_distance(&a, &b).unwrap();
            let ba = manifold_distance(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
            prop_assert!(manifold_distance(&a, &a).unwrap() == 0.0);
            let ac = manifold_distance(&a, &c).unwrap();
            let bc = manifold_distance(&b, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9, "triangle violated: {ac} > {ab} + {bc}");
        }

        #[test]
        fn resampling_preserves_topology_and_anchors(
            radii in radii(),
            n in 4..40_usize,
        ) {
            let curve = star_polygon(radii);
            let fine = curve.arc_length_interpolate(n).unwrap();
            prop_assert_eq!(fine.node_count(), n);
            prop_assert_eq!(fine.nodes()[0], curve.nodes()[0]);
            // Chord lengths can only shrink under resampling of a convex
            // arc, but total length stays within the source length.
            prop_assert!(fine.total_length() <= curve.total_length() + 1e-9);
        }
    }
}
