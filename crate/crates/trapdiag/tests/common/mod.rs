//! Shared invariant checkers for the integration suites.
//!
//! These deliberately recompute expectations from first principles (the
//! equidistance formula, collinearity, point-in-trapezoid tests) instead of
//! reusing layout-internal helpers.

use trapdiag::geometry::Point;
use trapdiag::layout::{compose_seq, compose_tensor, layout_id, BspNode, Diagram, LayoutOptions};
use trapdiag::term::{Term, TermNode};
use trapdiag::Trapezoid;

pub const TOL: f64 = 1e-9;

/// Largest coordinate gap across all recorded seam pairs in the tree:
/// sequential join pairs and tensor seam sample pairs.
pub fn max_seam_gap(tree: &BspNode) -> f64 {
    fn gap(a: &Point, b: &Point) -> f64 {
        (a.x - b.x).abs().max((a.y - b.y).abs())
    }
    match tree {
        BspNode::Region { .. } => 0.0,
        BspNode::SeqSplit {
            joins, left, right, ..
        } => joins
            .iter()
            .map(|(a, b)| gap(a, b))
            .fold(0.0, f64::max)
            .max(max_seam_gap(left))
            .max(max_seam_gap(right)),
        BspNode::TenSplit {
            upper_bottom,
            lower_top,
            top,
            bottom,
        } => upper_bottom
            .iter()
            .zip(lower_top)
            .map(|(a, b)| gap(a, b))
            .fold(0.0, f64::max)
            .max(max_seam_gap(top))
            .max(max_seam_gap(bottom)),
    }
}

/// Number of sequential join pairs anywhere in the tree.
pub fn count_seq_joins(tree: &BspNode) -> usize {
    match tree {
        BspNode::Region { .. } => 0,
        BspNode::SeqSplit {
            joins, left, right, ..
        } => joins.len() + count_seq_joins(left) + count_seq_joins(right),
        BspNode::TenSplit { top, bottom, .. } => count_seq_joins(top) + count_seq_joins(bottom),
    }
}

/// Asserts that `points` are exactly the equidistant boundary points
/// `(x, side - i - 1/2)` for `i = 0..side`, top to bottom.
pub fn assert_equidistant(points: &[Point], x: f64, side: usize, what: &str) {
    assert_eq!(points.len(), side, "{what}: expected {side} points, got {points:?}");
    for (i, p) in points.iter().enumerate() {
        let expected_y = side as f64 - (i as f64 + 0.5);
        assert!(
            (p.x - x).abs() <= TOL && (p.y - expected_y).abs() <= TOL,
            "{what}: point {i} is {p:?}, expected ({x}, {expected_y})"
        );
    }
    for pair in points.windows(2) {
        assert!(
            (pair[0].y - pair[1].y - 1.0).abs() <= TOL,
            "{what}: spacing must be exactly 1, got {pair:?}"
        );
    }
}

/// Asserts every wire control point and node anchor lies inside the outline.
pub fn assert_contained(diagram: &Diagram, what: &str) {
    for wire in &diagram.wires {
        for seg in &wire.segments {
            for p in seg.points() {
                assert!(
                    diagram.outline.contains(p, TOL),
                    "{what}: control point {p:?} escapes outline {:?}",
                    diagram.outline
                );
            }
        }
    }
    for node in &diagram.nodes {
        assert!(
            diagram.outline.contains(node.anchor, TOL),
            "{what}: anchor {:?} escapes outline {:?}",
            node.anchor,
            diagram.outline
        );
    }
}

/// Outline shape: a right trapezoid with side lengths exactly the arities
/// and a positive width. The right angles and bottom-left origin are
/// encoded in the vertex layout.
pub fn assert_outline_shape(diagram: &Diagram, term: &Term, what: &str) {
    let (l, r) = term.arity();
    let outline = diagram.outline;
    assert_eq!(outline.left, l as f64, "{what}: left side");
    assert_eq!(outline.right, r as f64, "{what}: right side");
    assert!(outline.width > 0.0, "{what}: width");
    let [origin, bottom_right, top_right, top_left] = outline.vertices();
    assert_eq!((origin.x, origin.y), (0.0, 0.0), "{what}: origin");
    assert_eq!(bottom_right.y, 0.0, "{what}: bottom edge horizontal");
    assert_eq!(top_right.x, bottom_right.x, "{what}: right angle at bottom right");
    assert_eq!(top_left.x, origin.x, "{what}: right angle at bottom left");
}

fn top_edge_is_straight(outline: Trapezoid, seam_top: Point, what: &str) {
    let expected = outline.top_edge_y(seam_top.x);
    assert!(
        (seam_top.y - expected).abs() <= TOL,
        "{what}: seam top {seam_top:?} off the outline top edge (expected y={expected})"
    );
}

/// Replays the layout fold through the public composition operations,
/// checking after every step that the freshly composed outline's top edge is
/// still one straight segment through the new seam, and that the seam pairs
/// introduced by the step coincide.
pub fn layout_with_step_checks(term: &Term, opts: &LayoutOptions) -> Diagram {
    match term.node() {
        TermNode::Gen(name) => {
            let mut sig = trapdiag::Signature::new();
            for object in term.src().iter().chain(term.tgt()) {
                if !sig.has_object(object) {
                    sig.add_object(object.clone()).unwrap();
                }
            }
            sig.add_generator(name.clone(), term.src().to_vec(), term.tgt().to_vec())
                .unwrap();
            trapdiag::layout::layout_leaf(name, &sig, opts).unwrap()
        }
        TermNode::Id(objects) => layout_id(objects, opts),
        TermNode::Seq(l, r) => {
            let left = layout_with_step_checks(l, opts);
            let right = layout_with_step_checks(r, opts);
            let composed = compose_seq(left, right).expect("typechecked");
            match &composed.tree {
                BspNode::SeqSplit { seam_top, joins, .. } => {
                    top_edge_is_straight(composed.outline, *seam_top, "seq step");
                    for (a, b) in joins {
                        assert!(
                            (a.x - b.x).abs() <= TOL && (a.y - b.y).abs() <= TOL,
                            "seq step: fresh join pair {a:?} vs {b:?}"
                        );
                    }
                }
                other => panic!("seq composition must produce a SeqSplit, got {other:?}"),
            }
            composed
        }
        TermNode::Ten(t, b) => {
            let top = layout_with_step_checks(t, opts);
            let bottom = layout_with_step_checks(b, opts);
            let composed = compose_tensor(top, bottom);
            match &composed.tree {
                BspNode::TenSplit {
                    upper_bottom,
                    lower_top,
                    ..
                } => {
                    for (a, b) in upper_bottom.iter().zip(lower_top) {
                        assert!(
                            (a.x - b.x).abs() <= TOL && (a.y - b.y).abs() <= TOL,
                            "ten step: seam samples {a:?} vs {b:?}"
                        );
                    }
                }
                other => panic!("tensor composition must produce a TenSplit, got {other:?}"),
            }
            composed
        }
    }
}

/// Runs all final-diagram invariants at once.
pub fn assert_diagram_invariants(diagram: &Diagram, term: &Term, what: &str) {
    assert_outline_shape(diagram, term, what);
    let (l, r) = term.arity();
    assert_equidistant(&diagram.boundary_left_points(), 0.0, l, &format!("{what}: left boundary"));
    let right = diagram.boundary_right_points();
    assert_eq!(right.len(), r, "{what}: right boundary count");
    for (i, p) in right.iter().enumerate() {
        let expected_y = r as f64 - (i as f64 + 0.5);
        assert!(
            (p.x - diagram.outline.width).abs() <= TOL && (p.y - expected_y).abs() <= TOL,
            "{what}: right boundary point {i} is {p:?}"
        );
    }
    let gap = max_seam_gap(&diagram.tree);
    assert!(gap <= TOL, "{what}: seam gap {gap}");
    assert_contained(diagram, what);
}
