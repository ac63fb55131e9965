//! Trapezoid outlines, plane transformations and their action on points and
//! cubic Bézier wires.
//!
//! All layout math is done in diagram-local coordinates with the y axis
//! pointing up and one unit equal to one wire spacing. The outline of every
//! diagram is a right trapezoid with both right angles at the bottom and the
//! origin at its bottom-left vertex; composition reshapes sub-diagrams with
//! the pinch / scale / shear maps defined here.

/// A point in diagram-local coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A right trapezoid with vertices `(0,0)`, `(w,0)`, `(w,r)`, `(0,l)`.
///
/// `left` and `right` are the side lengths on `x = 0` and `x = width`; for a
/// laid-out diagram they equal the source and target arity. Both must be at
/// least 1 so the shape never degenerates into a triangle or a segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trapezoid {
    pub left: f64,
    pub right: f64,
    pub width: f64,
}

impl Trapezoid {
    /// Panics if the side lengths are below 1 or the width is not positive;
    /// those shapes are excluded by construction everywhere in the crate.
    pub fn new(left: f64, right: f64, width: f64) -> Self {
        assert!(
            left >= 1.0 && right >= 1.0 && width > 0.0,
            "degenerate trapezoid: l={left}, r={right}, w={width}"
        );
        Trapezoid { left, right, width }
    }

    /// Height of the top edge above `x`: the line through `(0, l)` and `(w, r)`.
    pub fn top_edge_y(&self, x: f64) -> f64 {
        self.top_edge_slope() * x + self.left
    }

    /// Slope `(r - l) / w` of the top edge.
    pub fn top_edge_slope(&self) -> f64 {
        (self.right - self.left) / self.width
    }

    /// Corner points in counter-clockwise order starting at the origin.
    pub fn vertices(&self) -> [Point; 4] {
        [
            Point::new(0.0, 0.0),
            Point::new(self.width, 0.0),
            Point::new(self.width, self.right),
            Point::new(0.0, self.left),
        ]
    }

    /// Whether `p` lies inside the trapezoid, with `tol` slack on every edge.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= -tol
            && p.x <= self.width + tol
            && p.y >= -tol
            && p.y <= self.top_edge_y(p.x) + tol
    }
}

/// A pointwise map of the plane used during diagram composition.
///
/// The pinches reshape a trapezoid's top edge by rescaling each vertical
/// line; they fix the bottom edge, and fix the left (`PinchRight`) or right
/// (`PinchLeft`) side entirely. `ScaleX`, `ShearY` and `Translate` are the
/// usual affine maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaneMap {
    /// Move the top-right vertex of `outline` to height `target`.
    PinchRight { outline: Trapezoid, target: f64 },
    /// Move the top-left vertex of `outline` to height `target`.
    PinchLeft { outline: Trapezoid, target: f64 },
    ScaleX { factor: f64 },
    ShearY { slope: f64 },
    Translate { dx: f64, dy: f64 },
}

impl PlaneMap {
    /// Applies the map to a single point.
    ///
    /// A non-finite result indicates an invariant violation upstream (a
    /// degenerate outline or a non-finite input); it is asserted in debug
    /// builds.
    pub fn apply(&self, p: Point) -> Point {
        let q = match *self {
            // The ratio is computed first so that wherever the pinched line
            // meets the original one the map is exactly the identity.
            PlaneMap::PinchRight { outline, target } => {
                let original = outline.top_edge_y(p.x);
                let pinched = (target - outline.left) / outline.width * p.x + outline.left;
                Point::new(p.x, p.y * (pinched / original))
            }
            PlaneMap::PinchLeft { outline, target } => {
                let original = outline.top_edge_y(p.x);
                let pinched = (outline.right - target) / outline.width * p.x + target;
                Point::new(p.x, p.y * (pinched / original))
            }
            PlaneMap::ScaleX { factor } => Point::new(factor * p.x, p.y),
            PlaneMap::ShearY { slope } => Point::new(p.x, slope * p.x + p.y),
            PlaneMap::Translate { dx, dy } => Point::new(p.x + dx, p.y + dy),
        };
        debug_assert!(q.is_finite(), "plane map produced non-finite point {q:?}");
        q
    }
}

/// Seam height for the sequential composition of two trapezoids.
///
/// Returns the height `(w1*r2 + w2*l1) / (w1 + w2)` at which the two inner
/// top vertices must meet so that `(0, l1)`, `(w1, h)` and `(w1 + w2, r2)`
/// are collinear.
pub fn seam_height(w1: f64, w2: f64, l1: f64, r2: f64) -> f64 {
    (w1 * r2 + w2 * l1) / (w1 + w2)
}

/// The role of a wire endpoint within its diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointRole {
    /// Lies on the outline's left edge, part of the source boundary.
    BoundaryLeft,
    /// Lies on the outline's right edge, part of the target boundary.
    BoundaryRight,
    /// Attached to a node box port.
    NodePort,
}

impl EndpointRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            EndpointRole::BoundaryLeft => "boundary-left",
            EndpointRole::BoundaryRight => "boundary-right",
            EndpointRole::NodePort => "node-port",
        }
    }
}

/// A single cubic Bézier segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bezier {
    pub start: Point,
    pub ctrl1: Point,
    pub ctrl2: Point,
    pub end: Point,
}

impl Bezier {
    /// A segment between `start` and `end` with horizontal handles of length
    /// `handle` at both ends, pointing into the segment.
    pub fn horizontal_handles(start: Point, end: Point, handle: f64) -> Self {
        let dir = if end.x >= start.x { 1.0 } else { -1.0 };
        Bezier {
            start,
            ctrl1: Point::new(start.x + dir * handle, start.y),
            ctrl2: Point::new(end.x - dir * handle, end.y),
            end,
        }
    }

    pub fn points(&self) -> [Point; 4] {
        [self.start, self.ctrl1, self.ctrl2, self.end]
    }

    fn map_in_place(&mut self, f: &impl Fn(Point) -> Point) {
        self.start = f(self.start);
        self.ctrl1 = f(self.ctrl1);
        self.ctrl2 = f(self.ctrl2);
        self.end = f(self.end);
    }
}

/// A string of the diagram: one or more Bézier segments joined end to start.
///
/// Wires are oriented left to right; `start_role`/`end_role` describe what
/// the two outermost endpoints are attached to. Multi-segment wires arise
/// when sequential composition joins an open right endpoint of one diagram
/// with the matching open left endpoint of the next.
#[derive(Clone, Debug, PartialEq)]
pub struct Wire {
    pub segments: Vec<Bezier>,
    pub start_role: EndpointRole,
    pub end_role: EndpointRole,
}

impl Wire {
    pub fn single(segment: Bezier, start_role: EndpointRole, end_role: EndpointRole) -> Self {
        Wire {
            segments: vec![segment],
            start_role,
            end_role,
        }
    }

    pub fn start(&self) -> Point {
        self.segments.first().expect("wire has segments").start
    }

    pub fn end(&self) -> Point {
        self.segments.last().expect("wire has segments").end
    }

    /// Applies `f` to every control point of every segment.
    pub fn map_points_in_place(&mut self, f: &impl Fn(Point) -> Point) {
        for seg in &mut self.segments {
            seg.map_in_place(f);
        }
    }

    /// Applies a plane map to the wire by mapping its control points.
    ///
    /// Endpoints map exactly; for the non-linear pinches the interior of each
    /// segment is an approximation of the true image, which is accurate at
    /// wire-spacing scale.
    pub fn transform(&self, map: &PlaneMap) -> Wire {
        let mut wire = self.clone();
        wire.map_points_in_place(&|p| map.apply(p));
        wire
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn assert_close(a: Point, b: Point, tol: f64) {
        assert!(
            (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol,
            "{a:?} != {b:?}"
        );
    }

    #[test]
    fn pinch_right_moves_inner_vertex_to_target() {
        // Composing outlines (1,3,1) and (3,2,1) pinches the shared vertex
        // from height 3 down to 1.5.
        let map = PlaneMap::PinchRight {
            outline: Trapezoid::new(1.0, 3.0, 1.0),
            target: 1.5,
        };
        assert_close(map.apply(Point::new(1.0, 3.0)), Point::new(1.0, 1.5), TOL);
        // Points on the fixed left edge do not move.
        assert_close(map.apply(Point::new(0.0, 0.5)), Point::new(0.0, 0.5), TOL);
        // Halfway up the right side scales by target/right = 0.5.
        assert_close(map.apply(Point::new(1.0, 2.0)), Point::new(1.0, 1.0), TOL);
    }

    #[test]
    fn pinch_with_matching_height_is_identity() {
        let trap = Trapezoid::new(2.0, 3.0, 1.5);
        let right = PlaneMap::PinchRight {
            outline: trap,
            target: trap.right,
        };
        let left = PlaneMap::PinchLeft {
            outline: trap,
            target: trap.left,
        };
        for p in [Point::new(0.3, 0.7), Point::new(1.2, 2.0), Point::new(1.5, 3.0)] {
            assert_eq!(right.apply(p), p);
            assert_eq!(left.apply(p), p);
        }
    }

    #[test]
    fn scale_x_rescales_abscissa_only() {
        let map = PlaneMap::ScaleX { factor: 2.0 };
        assert_close(map.apply(Point::new(1.0, 3.0)), Point::new(2.0, 3.0), TOL);
    }

    #[test]
    fn seam_height_matches_line_evaluation_oracle() {
        // Independent oracle: h is the y of the line through (0, l1) and
        // (w1 + w2, r2), evaluated at x = w1.
        fn oracle(w1: f64, w2: f64, l1: f64, r2: f64) -> f64 {
            let slope = (r2 - l1) / (w1 + w2);
            slope * w1 + l1
        }
        for (w1, w2, l1, r2, expect) in [
            (1.0, 1.0, 1.0, 2.0, 1.5),
            (1.0, 1.0, 3.0, 3.0, 3.0),
            (2.0, 1.0, 1.0, 4.0, 3.0),
        ] {
            assert!((seam_height(w1, w2, l1, r2) - expect).abs() <= TOL);
            assert!((seam_height(w1, w2, l1, r2) - oracle(w1, w2, l1, r2)).abs() <= TOL);
        }
    }

    #[test]
    fn top_edge_slope_is_rise_over_run() {
        assert!((Trapezoid::new(1.0, 2.0, 2.0).top_edge_slope() - 0.5).abs() <= TOL);
        assert_eq!(Trapezoid::new(2.0, 2.0, 5.0).top_edge_slope(), 0.0);
        assert!((Trapezoid::new(3.0, 1.0, 1.0).top_edge_slope() - (-2.0)).abs() <= TOL);
    }

    #[test]
    fn wire_transforms_apply_pointwise() {
        let straight = Wire::single(
            Bezier::horizontal_handles(Point::new(0.0, 0.5), Point::new(1.0, 0.5), 0.3),
            EndpointRole::BoundaryLeft,
            EndpointRole::BoundaryRight,
        );
        let shifted = straight.transform(&PlaneMap::Translate { dx: 1.0, dy: 0.0 });
        assert_close(shifted.start(), Point::new(1.0, 0.5), TOL);
        assert_close(shifted.end(), Point::new(2.0, 0.5), TOL);
        assert_eq!(shifted.start_role, EndpointRole::BoundaryLeft);

        let flat = Wire::single(
            Bezier::horizontal_handles(Point::new(0.0, 0.0), Point::new(2.0, 0.0), 0.6),
            EndpointRole::BoundaryLeft,
            EndpointRole::BoundaryRight,
        );
        let sheared = flat.transform(&PlaneMap::ShearY { slope: 0.5 });
        assert_close(sheared.start(), Point::new(0.0, 0.0), TOL);
        assert_close(sheared.end(), Point::new(2.0, 1.0), TOL);

        let trap = Trapezoid::new(1.0, 3.0, 1.0);
        let noop = PlaneMap::PinchRight {
            outline: trap,
            target: trap.right,
        };
        assert_eq!(straight.transform(&noop), straight);
    }

    fn arb_trapezoid() -> impl Strategy<Value = Trapezoid> {
        (1.0..6.0f64, 1.0..6.0f64, 0.25..8.0f64).prop_map(|(l, r, w)| Trapezoid::new(l, r, w))
    }

    proptest! {
        #[test]
        fn pinch_right_fixes_bottom_and_left_edges(
            trap in arb_trapezoid(),
            target in 1.0..6.0f64,
            t in 0.0..1.0f64,
        ) {
            let map = PlaneMap::PinchRight { outline: trap, target };
            let on_bottom = Point::new(t * trap.width, 0.0);
            let on_left = Point::new(0.0, t * trap.left);
            prop_assert_eq!(map.apply(on_bottom), on_bottom);
            prop_assert_eq!(map.apply(on_left), on_left);
        }

        #[test]
        fn pinch_left_fixes_bottom_and_right_edges(
            trap in arb_trapezoid(),
            target in 1.0..6.0f64,
            t in 0.0..1.0f64,
        ) {
            let map = PlaneMap::PinchLeft { outline: trap, target };
            let on_bottom = Point::new(t * trap.width, 0.0);
            let on_right = Point::new(trap.width, t * trap.right);
            prop_assert_eq!(map.apply(on_bottom), on_bottom);
            let mapped = map.apply(on_right);
            prop_assert!((mapped.x - on_right.x).abs() <= 1e-9);
            prop_assert!((mapped.y - on_right.y).abs() <= 1e-9);
        }

        #[test]
        fn pinch_right_maps_top_edge_onto_target_line(
            trap in arb_trapezoid(),
            target in 1.0..6.0f64,
            t in 0.0..1.0f64,
        ) {
            let x = t * trap.width;
            let map = PlaneMap::PinchRight { outline: trap, target };
            let mapped = map.apply(Point::new(x, trap.top_edge_y(x)));
            let expected = (target - trap.left) / trap.width * x + trap.left;
            prop_assert!((mapped.y - expected).abs() <= 1e-9);
        }

        #[test]
        fn pinch_scales_each_vertical_line_uniformly(
            trap in arb_trapezoid(),
            target in 1.0..6.0f64,
            t in 0.1..4.0f64,
            x in 0.0..1.0f64,
            y in 0.1..4.0f64,
        ) {
            let map = PlaneMap::PinchRight { outline: trap, target };
            let x = x * trap.width;
            let scaled = map.apply(Point::new(x, t * y)).y;
            let base = map.apply(Point::new(x, y)).y;
            prop_assert!((scaled - t * base).abs() <= 1e-9 * (1.0 + scaled.abs()));
        }

        #[test]
        fn shear_and_scale_invert(
            slope in -3.0..3.0f64,
            factor in 0.1..10.0f64,
            x in -10.0..10.0f64,
            y in -10.0..10.0f64,
        ) {
            let p = Point::new(x, y);
            let sheared = PlaneMap::ShearY { slope: -slope }
                .apply(PlaneMap::ShearY { slope }.apply(p));
            prop_assert!((sheared.x - p.x).abs() <= 1e-12);
            prop_assert!((sheared.y - p.y).abs() <= 1e-12 * (1.0 + y.abs().max(slope.abs() * x.abs())));
            let scaled = PlaneMap::ScaleX { factor: 1.0 / factor }
                .apply(PlaneMap::ScaleX { factor }.apply(p));
            prop_assert!((scaled.x - p.x).abs() <= 1e-12 * (1.0 + x.abs()));
            prop_assert!(scaled.y == p.y);
        }

        #[test]
        fn seam_height_is_a_strict_convex_combination(
            w1 in 0.1..10.0f64,
            w2 in 0.1..10.0f64,
            l1 in 1.0..6.0f64,
            r2 in 1.0..6.0f64,
        ) {
            let h = seam_height(w1, w2, l1, r2);
            let (lo, hi) = (l1.min(r2), l1.max(r2));
            if l1 != r2 {
                prop_assert!(lo < h && h < hi, "h={h} not strictly inside ({lo}, {hi})");
            } else {
                prop_assert!((h - l1).abs() <= 1e-12);
            }
        }
    }
}
