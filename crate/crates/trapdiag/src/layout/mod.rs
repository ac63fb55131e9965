//! The recursive fold from typechecked terms to laid-out diagrams.
//!
//! Every diagram lives inside a right trapezoid whose left and right side
//! lengths equal the term's source and target arity. Sequential composition
//! pinches the two inner top corners to a common seam height, tensoring
//! scales both operands to the wider width and shears the upper one onto the
//! lower one's top edge. The composition structure is recorded in a binary
//! space-partition tree alongside the flattened geometry.

mod naive;

pub use naive::layout_naive;

use crate::geometry::{seam_height, Bezier, EndpointRole, PlaneMap, Point, Trapezoid, Wire};
use crate::semantics::{fold, MonoidalAlgebra};
use crate::term::{Signature, Term};
use thiserror::Error;

/// Node boxes are this many units from center to edge. Boxes are rigid:
/// plane maps move only the anchor.
pub const NODE_HALF_EXTENT: (f64, f64) = (0.25, 0.25);

/// Bézier handles at wire endpoints are horizontal, with this fraction of
/// the local horizontal clearance as their length.
pub const HANDLE_FRACTION: f64 = 0.3;

/// Number of sample points stored along each tensor seam.
pub const SEAM_SAMPLES: usize = 10;

/// A rigid, axis-aligned labelled box centered on `anchor`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeMark {
    pub anchor: Point,
    pub label: String,
    pub half_extent: (f64, f64),
}

/// Binary space-partition tree recording how compositions split the diagram.
///
/// The stored geometry (seam segments, join pairs, seam samples) is kept in
/// composite coordinates: it is transformed together with the wires whenever
/// the diagram is reshaped by a later composition.
#[derive(Clone, Debug, PartialEq)]
pub enum BspNode {
    /// A leaf region; indices point into the diagram's node and wire lists.
    Region { nodes: Vec<usize>, wires: Vec<usize> },
    /// A sequential split along the vertical seam segment.
    ///
    /// `joins` pairs the former right endpoints of the left sub-diagram with
    /// the former left endpoints of the right one, top to bottom; after a
    /// correct composition each pair coincides.
    SeqSplit {
        seam_bottom: Point,
        seam_top: Point,
        joins: Vec<(Point, Point)>,
        left: Box<BspNode>,
        right: Box<BspNode>,
    },
    /// A tensor split along the seam from the left edge to the right edge.
    ///
    /// `upper_bottom` samples the top sub-diagram's bottom edge and
    /// `lower_top` the bottom sub-diagram's top edge; after a correct
    /// composition the two sampled polylines coincide.
    TenSplit {
        upper_bottom: Vec<Point>,
        lower_top: Vec<Point>,
        top: Box<BspNode>,
        bottom: Box<BspNode>,
    },
}

impl BspNode {
    fn map_points_in_place(&mut self, f: &impl Fn(Point) -> Point) {
        match self {
            BspNode::Region { .. } => {}
            BspNode::SeqSplit {
                seam_bottom,
                seam_top,
                joins,
                left,
                right,
            } => {
                *seam_bottom = f(*seam_bottom);
                *seam_top = f(*seam_top);
                for (a, b) in joins.iter_mut() {
                    *a = f(*a);
                    *b = f(*b);
                }
                left.map_points_in_place(f);
                right.map_points_in_place(f);
            }
            BspNode::TenSplit {
                upper_bottom,
                lower_top,
                top,
                bottom,
            } => {
                for p in upper_bottom.iter_mut().chain(lower_top.iter_mut()) {
                    *p = f(*p);
                }
                top.map_points_in_place(f);
                bottom.map_points_in_place(f);
            }
        }
    }

    fn remap_indices(self, node_map: &impl Fn(usize) -> usize, wire_map: &impl Fn(usize) -> usize) -> BspNode {
        match self {
            BspNode::Region { nodes, wires } => BspNode::Region {
                nodes: nodes.into_iter().map(node_map).collect(),
                wires: wires.into_iter().map(wire_map).collect(),
            },
            BspNode::SeqSplit {
                seam_bottom,
                seam_top,
                joins,
                left,
                right,
            } => BspNode::SeqSplit {
                seam_bottom,
                seam_top,
                joins,
                left: Box::new(left.remap_indices(node_map, wire_map)),
                right: Box::new(right.remap_indices(node_map, wire_map)),
            },
            BspNode::TenSplit {
                upper_bottom,
                lower_top,
                top,
                bottom,
            } => BspNode::TenSplit {
                upper_bottom,
                lower_top,
                top: Box::new(top.remap_indices(node_map, wire_map)),
                bottom: Box::new(bottom.remap_indices(node_map, wire_map)),
            },
        }
    }
}

/// A laid-out diagram: its trapezoid outline, the BSP tree of the
/// composition structure, and the flattened wires and node marks in
/// composite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    pub outline: Trapezoid,
    pub tree: BspNode,
    pub wires: Vec<Wire>,
    pub nodes: Vec<NodeMark>,
}

impl Diagram {
    /// Applies `f` to every wire control point, node anchor and BSP sample
    /// point. Half-extents stay fixed; the outline is left for the caller to
    /// update.
    pub(crate) fn map_points_in_place(&mut self, f: &impl Fn(Point) -> Point) {
        for wire in &mut self.wires {
            wire.map_points_in_place(f);
        }
        for node in &mut self.nodes {
            node.anchor = f(node.anchor);
        }
        self.tree.map_points_in_place(f);
    }

    /// Wire endpoints on the left boundary, ordered top to bottom.
    pub fn boundary_left_points(&self) -> Vec<Point> {
        let mut points: Vec<Point> = self
            .wires
            .iter()
            .filter(|w| w.start_role == EndpointRole::BoundaryLeft)
            .map(|w| w.start())
            .collect();
        points.sort_by(|a, b| b.y.total_cmp(&a.y));
        points
    }

    /// Wire endpoints on the right boundary, ordered top to bottom.
    pub fn boundary_right_points(&self) -> Vec<Point> {
        let mut points: Vec<Point> = self
            .wires
            .iter()
            .filter(|w| w.end_role == EndpointRole::BoundaryRight)
            .map(|w| w.end())
            .collect();
        points.sort_by(|a, b| b.y.total_cmp(&a.y));
        points
    }

    /// Axis-aligned bounding box over the outline, all wire control points
    /// and the node boxes.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut grow = |p: Point| {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        };
        for v in self.outline.vertices() {
            grow(v);
        }
        for wire in &self.wires {
            for seg in &wire.segments {
                for p in seg.points() {
                    grow(p);
                }
            }
        }
        for node in &self.nodes {
            grow(Point::new(node.anchor.x - node.half_extent.0, node.anchor.y - node.half_extent.1));
            grow(Point::new(node.anchor.x + node.half_extent.0, node.anchor.y + node.half_extent.1));
        }
        (min, max)
    }
}

/// How wide generator leaves are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LeafWidth {
    /// `max(source arity, target arity)`: keeps every leaf's top edge slope
    /// at magnitude 1 or less.
    MaxArity,
    /// A fixed width; must exceed the node box width.
    Fixed(f64),
}

/// Tunables for the layout fold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayoutOptions {
    pub leaf_width: LeafWidth,
    pub id_width: f64,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions {
            leaf_width: LeafWidth::MaxArity,
            id_width: 1.0,
        }
    }
}

impl LayoutOptions {
    pub fn validate(&self) -> Result<(), LayoutError> {
        if let LeafWidth::Fixed(w) = self.leaf_width {
            if !(w > 2.0 * NODE_HALF_EXTENT.0) || !w.is_finite() {
                return Err(LayoutError::BadOptions(format!(
                    "leaf width must be finite and greater than {}",
                    2.0 * NODE_HALF_EXTENT.0
                )));
            }
        }
        if !(self.id_width > 0.0) || !self.id_width.is_finite() {
            return Err(LayoutError::BadOptions(
                "identity width must be finite and positive".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` has an empty boundary; layout requires arity >= 1 on both sides")]
    ZeroArity(String),
    #[error("cannot compose sequentially: left side ends with {left} strings, right side starts with {right}")]
    BoundaryMismatch { left: f64, right: f64 },
    #[error("invalid layout options: {0}")]
    BadOptions(String),
}

/// Equidistant boundary heights on a side of length `side`: index 0 is the
/// topmost string.
fn boundary_height(side: usize, index: usize) -> f64 {
    side as f64 - (index as f64 + 0.5)
}

/// Port heights along a box edge of half-height `hy`, top to bottom.
fn port_height(anchor_y: f64, hy: f64, count: usize, index: usize) -> f64 {
    anchor_y + hy - (index as f64 + 0.5) * (2.0 * hy / count as f64)
}

fn leaf_diagram(label: &str, src_arity: usize, tgt_arity: usize, opts: &LayoutOptions) -> Diagram {
    let (l, r) = (src_arity, tgt_arity);
    assert!(l >= 1 && r >= 1, "leaf arities checked by caller");
    let width = match opts.leaf_width {
        LeafWidth::MaxArity => l.max(r) as f64,
        LeafWidth::Fixed(w) => w,
    };
    let outline = Trapezoid::new(l as f64, r as f64, width);
    let (hx, hy) = NODE_HALF_EXTENT;
    let anchor = Point::new(width / 2.0, outline.top_edge_y(width / 2.0) / 2.0);
    let mut wires = Vec::with_capacity(l + r);
    for i in 0..l {
        let start = Point::new(0.0, boundary_height(l, i));
        let port = Point::new(anchor.x - hx, port_height(anchor.y, hy, l, i));
        let handle = HANDLE_FRACTION * (port.x - start.x);
        wires.push(Wire::single(
            Bezier::horizontal_handles(start, port, handle),
            EndpointRole::BoundaryLeft,
            EndpointRole::NodePort,
        ));
    }
    for j in 0..r {
        let port = Point::new(anchor.x + hx, port_height(anchor.y, hy, r, j));
        let end = Point::new(width, boundary_height(r, j));
        let handle = HANDLE_FRACTION * (end.x - port.x);
        wires.push(Wire::single(
            Bezier::horizontal_handles(port, end, handle),
            EndpointRole::NodePort,
            EndpointRole::BoundaryRight,
        ));
    }
    Diagram {
        outline,
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

/// Lays out a single generator: one labelled box with its strings fanned out
/// to equidistant boundary points.
pub fn layout_leaf(gen: &str, sig: &Signature, opts: &LayoutOptions) -> Result<Diagram, LayoutError> {
    let ty = sig
        .generator(gen)
        .ok_or_else(|| LayoutError::UnknownGenerator(gen.to_string()))?;
    if ty.src.is_empty() || ty.tgt.is_empty() {
        return Err(LayoutError::ZeroArity(gen.to_string()));
    }
    Ok(leaf_diagram(gen, ty.src.len(), ty.tgt.len(), opts))
}

/// Lays out an identity: straight horizontal strings, no node.
pub fn layout_id(objects: &[String], opts: &LayoutOptions) -> Diagram {
    let n = objects.len();
    assert!(n >= 1, "identity needs at least one object");
    let width = opts.id_width;
    let outline = Trapezoid::new(n as f64, n as f64, width);
    let wires: Vec<Wire> = (0..n)
        .map(|i| {
            let y = boundary_height(n, i);
            Wire::single(
                Bezier::horizontal_handles(
                    Point::new(0.0, y),
                    Point::new(width, y),
                    HANDLE_FRACTION * width,
                ),
                EndpointRole::BoundaryLeft,
                EndpointRole::BoundaryRight,
            )
        })
        .collect();
    Diagram {
        outline,
        tree: BspNode::Region {
            nodes: Vec::new(),
            wires: (0..n).collect(),
        },
        wires,
        nodes: Vec::new(),
    }
}

/// Indices of wires open on the right, ordered top to bottom by endpoint.
fn open_right(diagram: &Diagram) -> Vec<usize> {
    let mut open: Vec<(usize, f64)> = diagram
        .wires
        .iter()
        .enumerate()
        .filter(|(_, w)| w.end_role == EndpointRole::BoundaryRight)
        .map(|(i, w)| (i, w.end().y))
        .collect();
    open.sort_by(|a, b| b.1.total_cmp(&a.1));
    open.into_iter().map(|(i, _)| i).collect()
}

/// Indices of wires open on the left, ordered top to bottom by endpoint.
fn open_left(diagram: &Diagram) -> Vec<usize> {
    let mut open: Vec<(usize, f64)> = diagram
        .wires
        .iter()
        .enumerate()
        .filter(|(_, w)| w.start_role == EndpointRole::BoundaryLeft)
        .map(|(i, w)| (i, w.start().y))
        .collect();
    open.sort_by(|a, b| b.1.total_cmp(&a.1));
    open.into_iter().map(|(i, _)| i).collect()
}

/// Sequential composition: pinch both inner top corners to the shared seam
/// height, translate the right diagram into place, and join the matching
/// open wire endpoints into longer wires.
pub fn compose_seq(mut d1: Diagram, mut d2: Diagram) -> Result<Diagram, LayoutError> {
    if d1.outline.right != d2.outline.left {
        return Err(LayoutError::BoundaryMismatch {
            left: d1.outline.right,
            right: d2.outline.left,
        });
    }
    let (l1, w1) = (d1.outline.left, d1.outline.width);
    let (r2, w2) = (d2.outline.right, d2.outline.width);
    let h = seam_height(w1, w2, l1, r2);

    let pinch_right = PlaneMap::PinchRight {
        outline: d1.outline,
        target: h,
    };
    let pinch_left = PlaneMap::PinchLeft {
        outline: d2.outline,
        target: h,
    };
    let shift = PlaneMap::Translate { dx: w1, dy: 0.0 };
    d1.map_points_in_place(&|p| pinch_right.apply(p));
    d2.map_points_in_place(&|p| shift.apply(pinch_left.apply(p)));

    let right_open = open_right(&d1);
    let left_open = open_left(&d2);
    if right_open.len() != left_open.len() {
        return Err(LayoutError::BoundaryMismatch {
            left: right_open.len() as f64,
            right: left_open.len() as f64,
        });
    }

    let joins: Vec<(Point, Point)> = right_open
        .iter()
        .zip(&left_open)
        .map(|(&i1, &i2)| (d1.wires[i1].end(), d2.wires[i2].start()))
        .collect();

    // Join each open pair into a single wire, keeping the left constituent's
    // slot so region indices on the left stay valid.
    let Diagram {
        tree: left_tree,
        mut wires,
        mut nodes,
        ..
    } = d1;
    let node_offset = nodes.len();
    let mut right_wires: Vec<Option<Wire>> = d2.wires.into_iter().map(Some).collect();
    let mut right_wire_map = vec![usize::MAX; right_wires.len()];
    for (&i1, &i2) in right_open.iter().zip(&left_open) {
        let mut tail = right_wires[i2].take().expect("each open wire joins once");
        tail.segments[0].start = wires[i1].end();
        wires[i1].segments.extend(tail.segments);
        wires[i1].end_role = tail.end_role;
        right_wire_map[i2] = i1;
    }
    for (i, slot) in right_wires.iter_mut().enumerate() {
        if let Some(wire) = slot.take() {
            right_wire_map[i] = wires.len();
            wires.push(wire);
        }
    }
    nodes.extend(d2.nodes);
    let right_tree = d2
        .tree
        .remap_indices(&|n| n + node_offset, &|w| right_wire_map[w]);

    Ok(Diagram {
        outline: Trapezoid::new(l1, r2, w1 + w2),
        tree: BspNode::SeqSplit {
            seam_bottom: Point::new(w1, 0.0),
            seam_top: Point::new(w1, h),
            joins,
            left: Box::new(left_tree),
            right: Box::new(right_tree),
        },
        wires,
        nodes,
    })
}

/// Tensor composition with the first operand on top: scale both diagrams to
/// the wider width, shear the upper one so its bottom edge matches the lower
/// one's top edge, and stack.
pub fn compose_tensor(mut d1: Diagram, mut d2: Diagram) -> Diagram {
    let (l1, r1, w1) = (d1.outline.left, d1.outline.right, d1.outline.width);
    let (l2, r2, w2) = (d2.outline.left, d2.outline.right, d2.outline.width);
    let width = w1.max(w2);

    let upper_scale = PlaneMap::ScaleX { factor: width / w1 };
    let lower_scale = PlaneMap::ScaleX { factor: width / w2 };
    let shear = PlaneMap::ShearY {
        slope: (r2 - l2) / width,
    };
    let lift = PlaneMap::Translate { dx: 0.0, dy: l2 };

    d1.map_points_in_place(&|p| lift.apply(shear.apply(upper_scale.apply(p))));
    d2.map_points_in_place(&|p| lower_scale.apply(p));
    let (upper, lower) = (d1, d2);

    // Sample both sides of the seam through the same transform pipelines the
    // geometry went through: the upper diagram's bottom edge and the lower
    // diagram's top edge must land on the same polyline.
    let steps = SEAM_SAMPLES - 1;
    let upper_bottom: Vec<Point> = (0..SEAM_SAMPLES)
        .map(|i| {
            let x = w1 * i as f64 / steps as f64;
            lift.apply(shear.apply(upper_scale.apply(Point::new(x, 0.0))))
        })
        .collect();
    let lower_top: Vec<Point> = (0..SEAM_SAMPLES)
        .map(|i| {
            let x = w2 * i as f64 / steps as f64;
            lower_scale.apply(Point::new(x, lower.outline.top_edge_y(x)))
        })
        .collect();

    let node_offset = upper.nodes.len();
    let wire_offset = upper.wires.len();
    let mut wires = upper.wires;
    wires.extend(lower.wires);
    let mut nodes = upper.nodes;
    nodes.extend(lower.nodes);
    let bottom_tree = lower
        .tree
        .remap_indices(&|n| n + node_offset, &|w| w + wire_offset);

    Diagram {
        outline: Trapezoid::new(l1 + l2, r1 + r2, width),
        tree: BspNode::TenSplit {
            upper_bottom,
            lower_top,
            top: Box::new(upper.tree),
            bottom: Box::new(bottom_tree),
        },
        wires,
        nodes,
    }
}

/// The layout fold as a monoidal algebra, so laying out and evaluating a
/// term are the same traversal.
pub struct LayoutAlgebra {
    opts: LayoutOptions,
}

impl LayoutAlgebra {
    pub fn new(opts: LayoutOptions) -> Self {
        LayoutAlgebra { opts }
    }
}

impl MonoidalAlgebra for LayoutAlgebra {
    type Value = Diagram;

    fn on_gen(&self, name: &str, src: &[String], tgt: &[String]) -> Diagram {
        leaf_diagram(name, src.len(), tgt.len(), &self.opts)
    }

    fn on_id(&self, objects: &[String]) -> Diagram {
        layout_id(objects, &self.opts)
    }

    fn on_seq(&self, left: Diagram, right: Diagram) -> Diagram {
        compose_seq(left, right).expect("boundaries match after typechecking")
    }

    fn on_ten(&self, top: Diagram, bottom: Diagram) -> Diagram {
        compose_tensor(top, bottom)
    }
}

/// Lays out a typechecked term. The outline's side lengths equal the term's
/// arities.
pub fn layout(term: &Term, opts: &LayoutOptions) -> Diagram {
    fold(term, &LayoutAlgebra::new(*opts))
}
