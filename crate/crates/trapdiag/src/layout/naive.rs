//! The naive unit-square layout, kept as a comparison oracle.
//!
//! Every sub-diagram is drawn in the unit square; compositions juxtapose the
//! two squares and linearly squash the result back into the unit square. No
//! pinching happens, so boundary strings sit at each sub-diagram's own
//! equidistant heights and sequential seams are generally misaligned. Unlike
//! the trapezoid layout, boxes deform with the squashing.

use super::{BspNode, Diagram, NodeMark, HANDLE_FRACTION, NODE_HALF_EXTENT, SEAM_SAMPLES};
use crate::geometry::{Bezier, EndpointRole, Point, Trapezoid, Wire};
use crate::semantics::{fold, MonoidalAlgebra};
use crate::term::Term;

/// Scales by `(kx, ky)` then translates by `(dx, dy)`, deforming boxes too.
fn squash(mut diagram: Diagram, kx: f64, ky: f64, dx: f64, dy: f64) -> Diagram {
    diagram.map_points_in_place(&|p| Point::new(kx * p.x + dx, ky * p.y + dy));
    for node in &mut diagram.nodes {
        node.half_extent = (node.half_extent.0 * kx, node.half_extent.1 * ky);
    }
    diagram
}

fn unit_square() -> Trapezoid {
    Trapezoid::new(1.0, 1.0, 1.0)
}

fn naive_leaf(label: &str, src_arity: usize, tgt_arity: usize) -> Diagram {
    let (hx, hy) = NODE_HALF_EXTENT;
    let anchor = Point::new(0.5, 0.5);
    let mut wires = Vec::with_capacity(src_arity + tgt_arity);
    for i in 0..src_arity {
        let start = Point::new(0.0, (src_arity - i) as f64 / src_arity as f64 - 0.5 / src_arity as f64);
        let port = Point::new(
            anchor.x - hx,
            anchor.y + hy - (i as f64 + 0.5) * (2.0 * hy / src_arity as f64),
        );
        wires.push(Wire::single(
            Bezier::horizontal_handles(start, port, HANDLE_FRACTION * (port.x - start.x)),
            EndpointRole::BoundaryLeft,
            EndpointRole::NodePort,
        ));
    }
    for j in 0..tgt_arity {
        let port = Point::new(
            anchor.x + hx,
            anchor.y + hy - (j as f64 + 0.5) * (2.0 * hy / tgt_arity as f64),
        );
        let end = Point::new(1.0, (tgt_arity - j) as f64 / tgt_arity as f64 - 0.5 / tgt_arity as f64);
        wires.push(Wire::single(
            Bezier::horizontal_handles(port, end, HANDLE_FRACTION * (end.x - port.x)),
            EndpointRole::NodePort,
            EndpointRole::BoundaryRight,
        ));
    }
    Diagram {
        outline: unit_square(),
        tree: BspNode::Region {
            nodes: vec![0],
            wires: (0..wires.len()).collect(),
        },
        wires,
        nodes: vec![NodeMark {
            anchor,
            label: label.to_string(),
            half_extent: (hx, hy),
        }],
    }
}

fn naive_id(count: usize) -> Diagram {
    let wires: Vec<Wire> = (0..count)
        .map(|i| {
            let y = (count - i) as f64 / count as f64 - 0.5 / count as f64;
            Wire::single(
                Bezier::horizontal_handles(Point::new(0.0, y), Point::new(1.0, y), HANDLE_FRACTION),
                EndpointRole::BoundaryLeft,
                EndpointRole::BoundaryRight,
            )
        })
        .collect();
    Diagram {
        outline: unit_square(),
        tree: BspNode::Region {
            nodes: Vec::new(),
            wires: (0..count).collect(),
        },
        wires,
        nodes: Vec::new(),
    }
}

/// Concatenates geometry without joining any wires; seams stay as they fall.
fn combine(d1: Diagram, d2: Diagram, tree: impl FnOnce(BspNode, BspNode) -> BspNode) -> Diagram {
    let node_offset = d1.nodes.len();
    let wire_offset = d1.wires.len();
    let right_tree = d2
        .tree
        .remap_indices(&|n| n + node_offset, &|w| w + wire_offset);
    let mut wires = d1.wires;
    wires.extend(d2.wires);
    let mut nodes = d1.nodes;
    nodes.extend(d2.nodes);
    Diagram {
        outline: unit_square(),
        tree: tree(d1.tree, right_tree),
        wires,
        nodes,
    }
}

struct NaiveAlgebra;

impl MonoidalAlgebra for NaiveAlgebra {
    type Value = Diagram;

    fn on_gen(&self, name: &str, src: &[String], tgt: &[String]) -> Diagram {
        naive_leaf(name, src.len(), tgt.len())
    }

    fn on_id(&self, objects: &[String]) -> Diagram {
        naive_id(objects.len())
    }

    fn on_seq(&self, left: Diagram, right: Diagram) -> Diagram {
        let right = squash(right, 1.0, 1.0, 1.0, 0.0);
        let joins: Vec<(Point, Point)> = {
            let ends = super::open_right(&left);
            let starts = super::open_left(&right);
            ends.iter()
                .zip(&starts)
                .map(|(&i1, &i2)| (left.wires[i1].end(), right.wires[i2].start()))
                .collect()
        };
        let combined = combine(left, right, |l, r| BspNode::SeqSplit {
            seam_bottom: Point::new(1.0, 0.0),
            seam_top: Point::new(1.0, 1.0),
            joins,
            left: Box::new(l),
            right: Box::new(r),
        });
        squash(combined, 0.5, 1.0, 0.0, 0.0)
    }

    fn on_ten(&self, top: Diagram, bottom: Diagram) -> Diagram {
        let top = squash(top, 1.0, 1.0, 0.0, 1.0);
        let seam: Vec<Point> = (0..SEAM_SAMPLES)
            .map(|i| Point::new(i as f64 / (SEAM_SAMPLES - 1) as f64, 1.0))
            .collect();
        let combined = combine(top, bottom, |t, b| BspNode::TenSplit {
            upper_bottom: seam.clone(),
            lower_top: seam.clone(),
            top: Box::new(t),
            bottom: Box::new(b),
        });
        squash(combined, 1.0, 0.5, 0.0, 0.0)
    }
}

/// Lays out a term with the naive square method.
///
/// The result reuses [`Diagram`] but intentionally breaks its invariants:
/// the outline is always the unit square regardless of arity, wires are
/// never joined across seams, and `SeqSplit` join pairs generally do not
/// coincide. Useful only to compare against [`super::layout`].
pub fn layout_naive(term: &Term) -> Diagram {
    fold(term, &NaiveAlgebra)
}
