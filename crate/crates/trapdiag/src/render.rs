//! Deterministic emitters: SVG, TikZ and a JSON layout dump.
//!
//! All numbers are printed with fixed precision (6 decimals for SVG/TikZ,
//! 9 for JSON) so repeated renders are byte-identical across runs and
//! platforms. Internally y grows upward; the SVG emitter flips the axis at
//! the last moment.

use crate::geometry::Point;
use crate::layout::{BspNode, Diagram};
use std::fmt::Write;

/// Presentation knobs shared by the emitters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderStyle {
    /// Pixels per diagram unit in SVG output.
    pub scale: f64,
    /// Stroke width in output units.
    pub stroke_width: f64,
    /// Draw the outline and the BSP seams dashed, for debugging layouts.
    pub show_outline: bool,
    /// Label font size in output units.
    pub font_size: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            scale: 60.0,
            stroke_width: 1.5,
            show_outline: false,
            font_size: 14.0,
        }
    }
}

/// Whitespace margin around the drawing, in diagram units.
pub const MARGIN: f64 = 0.5;

fn fixed(value: f64, decimals: usize) -> String {
    // Normalize negative zero so output never depends on the sign of a zero.
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{value:.decimals$}")
}

fn fmt6(value: f64) -> String {
    fixed(value, 6)
}

fn fmt9(value: f64) -> String {
    fixed(value, 9)
}

/// The affine map from diagram coordinates to SVG pixel coordinates
/// (uniform scale plus y flip).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgProjection {
    pub scale: f64,
    min_x: f64,
    max_y: f64,
    pub width: f64,
    pub height: f64,
}

impl SvgProjection {
    pub fn for_diagram(diagram: &Diagram, style: &RenderStyle) -> Self {
        let (min, max) = diagram.bounding_box();
        SvgProjection {
            scale: style.scale,
            min_x: min.x - MARGIN,
            max_y: max.y + MARGIN,
            width: (max.x - min.x + 2.0 * MARGIN) * style.scale,
            height: (max.y - min.y + 2.0 * MARGIN) * style.scale,
        }
    }

    pub fn to_pixels(&self, p: Point) -> (f64, f64) {
        ((p.x - self.min_x) * self.scale, (self.max_y - p.y) * self.scale)
    }

    pub fn from_pixels(&self, px: f64, py: f64) -> Point {
        Point::new(px / self.scale + self.min_x, self.max_y - py / self.scale)
    }
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn svg_seams(node: &BspNode, proj: &SvgProjection, out: &mut String) {
    match node {
        BspNode::Region { .. } => {}
        BspNode::SeqSplit {
            seam_bottom,
            seam_top,
            left,
            right,
            ..
        } => {
            let (x1, y1) = proj.to_pixels(*seam_bottom);
            let (x2, y2) = proj.to_pixels(*seam_top);
            let _ = writeln!(
                out,
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c06060\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
                fmt6(x1),
                fmt6(y1),
                fmt6(x2),
                fmt6(y2)
            );
            svg_seams(left, proj, out);
            svg_seams(right, proj, out);
        }
        BspNode::TenSplit {
            upper_bottom,
            top,
            bottom,
            ..
        } => {
            let points: Vec<String> = upper_bottom
                .iter()
                .map(|p| {
                    let (x, y) = proj.to_pixels(*p);
                    format!("{},{}", fmt6(x), fmt6(y))
                })
                .collect();
            let _ = writeln!(
                out,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"#6060c0\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
                points.join(" ")
            );
            svg_seams(top, proj, out);
            svg_seams(bottom, proj, out);
        }
    }
}

/// Emits a standalone SVG 1.1 document.
///
/// Wires become cubic Bézier `path` elements, node marks become a `rect`
/// plus a centered `text`. Output bytes are a deterministic function of the
/// diagram and style.
pub fn to_svg(diagram: &Diagram, style: &RenderStyle) -> Vec<u8> {
    let proj = SvgProjection::for_diagram(diagram, style);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt6(proj.width),
        fmt6(proj.height),
        fmt6(proj.width),
        fmt6(proj.height)
    );

    if style.show_outline {
        let corners: Vec<String> = diagram
            .outline
            .vertices()
            .iter()
            .map(|v| {
                let (x, y) = proj.to_pixels(*v);
                format!("{},{}", fmt6(x), fmt6(y))
            })
            .collect();
        let _ = writeln!(
            out,
            "  <polygon points=\"{}\" fill=\"none\" stroke=\"#9090b0\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>",
            corners.join(" ")
        );
        svg_seams(&diagram.tree, &proj, &mut out);
    }

    for wire in &diagram.wires {
        let mut d = String::new();
        let (sx, sy) = proj.to_pixels(wire.start());
        let _ = write!(d, "M {},{}", fmt6(sx), fmt6(sy));
        for seg in &wire.segments {
            let (c1x, c1y) = proj.to_pixels(seg.ctrl1);
            let (c2x, c2y) = proj.to_pixels(seg.ctrl2);
            let (ex, ey) = proj.to_pixels(seg.end);
            let _ = write!(
                d,
                " C {},{} {},{} {},{}",
                fmt6(c1x),
                fmt6(c1y),
                fmt6(c2x),
                fmt6(c2y),
                fmt6(ex),
                fmt6(ey)
            );
        }
        let _ = writeln!(
            out,
            "  <path d=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{}\" stroke-linecap=\"round\"/>",
            d,
            fmt6(style.stroke_width)
        );
    }

    for node in &diagram.nodes {
        let (hx, hy) = node.half_extent;
        let (x, y) = proj.to_pixels(Point::new(node.anchor.x - hx, node.anchor.y + hy));
        let _ = writeln!(
            out,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"{}\"/>",
            fmt6(x),
            fmt6(y),
            fmt6(2.0 * hx * proj.scale),
            fmt6(2.0 * hy * proj.scale),
            fmt6(style.stroke_width)
        );
    }
    for node in &diagram.nodes {
        let (x, y) = proj.to_pixels(node.anchor);
        let _ = writeln!(
            out,
            "  <text x=\"{}\" y=\"{}\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\">{}</text>",
            fmt6(x),
            fmt6(y),
            fmt6(style.font_size),
            xml_escape(&node.label)
        );
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

fn tikz_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            c => out.push(c),
        }
    }
    out
}

fn tikz_point(p: Point) -> String {
    format!("({},{})", fmt6(p.x), fmt6(p.y))
}

fn tikz_seams(node: &BspNode, out: &mut String) {
    match node {
        BspNode::Region { .. } => {}
        BspNode::SeqSplit {
            seam_bottom,
            seam_top,
            left,
            right,
            ..
        } => {
            let _ = writeln!(
                out,
                "  \\draw[dashed, red!60] {} -- {};",
                tikz_point(*seam_bottom),
                tikz_point(*seam_top)
            );
            tikz_seams(left, out);
            tikz_seams(right, out);
        }
        BspNode::TenSplit {
            upper_bottom,
            top,
            bottom,
            ..
        } => {
            let points: Vec<String> = upper_bottom.iter().map(|p| tikz_point(*p)).collect();
            let _ = writeln!(out, "  \\draw[dashed, blue!60] {};", points.join(" -- "));
            tikz_seams(top, out);
            tikz_seams(bottom, out);
        }
    }
}

/// Emits a `tikzpicture` environment at one cm per diagram unit.
///
/// Each wire is a single `\draw` of chained Bézier segments; each node mark
/// is one bordered `\node`.
pub fn to_tikz(diagram: &Diagram, style: &RenderStyle) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\begin{{tikzpicture}}[line width={}pt]",
        fmt6(style.stroke_width * 0.75)
    );
    if style.show_outline {
        let corners: Vec<String> = diagram
            .outline
            .vertices()
            .iter()
            .map(|v| tikz_point(*v))
            .collect();
        let _ = writeln!(out, "  \\draw[dashed, gray] {} -- cycle;", corners.join(" -- "));
        tikz_seams(&diagram.tree, &mut out);
    }
    for wire in &diagram.wires {
        let mut path = tikz_point(wire.start());
        for seg in &wire.segments {
            let _ = write!(
                path,
                " .. controls {} and {} .. {}",
                tikz_point(seg.ctrl1),
                tikz_point(seg.ctrl2),
                tikz_point(seg.end)
            );
        }
        let _ = writeln!(out, "  \\draw {path};");
    }
    for node in &diagram.nodes {
        let (hx, hy) = node.half_extent;
        let _ = writeln!(
            out,
            "  \\node[draw, fill=white, minimum width={}cm, minimum height={}cm, inner sep=1pt] at {} {{{}}};",
            fmt6(2.0 * hx),
            fmt6(2.0 * hy),
            tikz_point(node.anchor),
            tikz_escape(&node.label)
        );
    }
    out.push_str("\\end{tikzpicture}\n");
    out
}

fn json_point(p: Point) -> String {
    format!("[{},{}]", fmt9(p.x), fmt9(p.y))
}

fn json_bsp(node: &BspNode, out: &mut String) {
    match node {
        BspNode::Region { nodes, wires } => {
            let nodes: Vec<String> = nodes.iter().map(usize::to_string).collect();
            let wires: Vec<String> = wires.iter().map(usize::to_string).collect();
            let _ = write!(
                out,
                "{{\"kind\":\"region\",\"nodes\":[{}],\"wires\":[{}]}}",
                nodes.join(","),
                wires.join(",")
            );
        }
        BspNode::SeqSplit {
            seam_bottom,
            left,
            right,
            ..
        } => {
            let _ = write!(out, "{{\"kind\":\"seq\",\"x\":{},\"left\":", fmt9(seam_bottom.x));
            json_bsp(left, out);
            out.push_str(",\"right\":");
            json_bsp(right, out);
            out.push('}');
        }
        BspNode::TenSplit {
            upper_bottom,
            top,
            bottom,
            ..
        } => {
            let first = upper_bottom.first().expect("seam has samples");
            let last = upper_bottom.last().expect("seam has samples");
            let _ = write!(
                out,
                "{{\"kind\":\"ten\",\"seam\":[{},{}],\"top\":",
                json_point(*first),
                json_point(*last)
            );
            json_bsp(top, out);
            out.push_str(",\"bottom\":");
            json_bsp(bottom, out);
            out.push('}');
        }
    }
}

fn json_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Emits the layout as JSON with a fixed key order and 9-decimal numbers.
///
/// Schema: `{"outline": {"l", "r", "w"}, "nodes": [{"label", "anchor"}],
/// "wires": [{"role", "beziers"}], "bsp": <tree>}`, where a wire's role is
/// `"<start>-><end>"` and `beziers` lists each segment's four control
/// points.
pub fn to_json(diagram: &Diagram) -> Vec<u8> {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"outline\":{{\"l\":{},\"r\":{},\"w\":{}}}",
        fmt9(diagram.outline.left),
        fmt9(diagram.outline.right),
        fmt9(diagram.outline.width)
    );
    out.push_str(",\"nodes\":[");
    for (i, node) in diagram.nodes.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"label\":\"{}\",\"anchor\":{}}}",
            json_escape(&node.label),
            json_point(node.anchor)
        );
    }
    out.push_str("],\"wires\":[");
    for (i, wire) in diagram.wires.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"role\":\"{}->{}\",\"beziers\":[",
            wire.start_role.as_str(),
            wire.end_role.as_str()
        );
        for (j, seg) in wire.segments.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(
                out,
                "[{},{},{},{}]",
                json_point(seg.start),
                json_point(seg.ctrl1),
                json_point(seg.ctrl2),
                json_point(seg.end)
            );
        }
        out.push_str("]}");
    }
    out.push_str("],\"bsp\":");
    json_bsp(&diagram.tree, &mut out);
    out.push_str("}\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{layout, layout_naive, LayoutOptions};
    use crate::term::random::paper_signature;
    use crate::term::{typecheck, RawTerm, Term};

    fn checked(term: RawTerm) -> Term {
        typecheck(&term, &paper_signature()).unwrap()
    }

    fn split_merge() -> Term {
        let pair = RawTerm::ten(RawTerm::gen("f"), RawTerm::gen("g"));
        checked(RawTerm::seq(pair.clone(), pair))
    }

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn leaf_svg_has_one_box_and_two_wires() {
        let diagram = layout(&checked(RawTerm::gen("h")), &LayoutOptions::default());
        let svg = String::from_utf8(to_svg(&diagram, &RenderStyle::default())).unwrap();
        assert_eq!(count(&svg, "<rect "), 1);
        assert_eq!(count(&svg, "<text "), 1);
        assert_eq!(count(&svg, "<path "), 2);
    }

    #[test]
    fn split_merge_svg_has_four_boxes() {
        let diagram = layout(&split_merge(), &LayoutOptions::default());
        let svg = String::from_utf8(to_svg(&diagram, &RenderStyle::default())).unwrap();
        assert_eq!(count(&svg, "<rect "), 4);
        assert_eq!(count(&svg, "<text "), 4);
    }

    #[test]
    fn emitters_are_deterministic() {
        let diagram = layout(&split_merge(), &LayoutOptions::default());
        let style = RenderStyle {
            show_outline: true,
            ..RenderStyle::default()
        };
        assert_eq!(to_svg(&diagram, &style), to_svg(&diagram, &style));
        assert_eq!(to_tikz(&diagram, &style), to_tikz(&diagram, &style));
        assert_eq!(to_json(&diagram), to_json(&diagram));
    }

    #[test]
    fn leaf_tikz_has_one_node_and_two_draws() {
        let diagram = layout(&checked(RawTerm::gen("h")), &LayoutOptions::default());
        let tikz = to_tikz(&diagram, &RenderStyle::default());
        assert_eq!(count(&tikz, "\\node"), 1);
        assert_eq!(count(&tikz, "\\draw"), 2);
        assert!(tikz.starts_with("\\begin{tikzpicture}"));
        assert!(tikz.ends_with("\\end{tikzpicture}\n"));
    }

    #[test]
    fn identity_tikz_is_a_single_draw() {
        let diagram = layout(&checked(RawTerm::id(["x"])), &LayoutOptions::default());
        let tikz = to_tikz(&diagram, &RenderStyle::default());
        assert_eq!(count(&tikz, "\\draw"), 1);
        assert_eq!(count(&tikz, "\\node"), 0);
    }

    #[test]
    fn pixel_projection_round_trips_endpoints() {
        let diagram = layout(&split_merge(), &LayoutOptions::default());
        let style = RenderStyle::default();
        let proj = SvgProjection::for_diagram(&diagram, &style);
        for wire in &diagram.wires {
            for p in [wire.start(), wire.end()] {
                let (px, py) = proj.to_pixels(p);
                let back = proj.from_pixels(px, py);
                assert!((back.x - p.x).abs() <= 1e-6 && (back.y - p.y).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn json_for_identity_matches_schema() {
        let diagram = layout(&checked(RawTerm::id(["x"])), &LayoutOptions::default());
        let bytes = to_json(&diagram);
        let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(value["outline"]["l"], serde_json::json!(1.0));
        assert_eq!(value["outline"]["r"], serde_json::json!(1.0));
        assert_eq!(value["outline"]["w"], serde_json::json!(1.0));
        assert_eq!(value["nodes"].as_array().unwrap().len(), 0);
        let wires = value["wires"].as_array().unwrap();
        assert_eq!(wires.len(), 1);
        assert_eq!(wires[0]["role"], "boundary-left->boundary-right");
        let beziers = wires[0]["beziers"].as_array().unwrap();
        assert_eq!(beziers.len(), 1);
        // Straight segment: all four control points at y = 0.5.
        for point in beziers[0].as_array().unwrap() {
            assert_eq!(point[1], serde_json::json!(0.5));
        }
        // Key order is fixed.
        let text = String::from_utf8(bytes).unwrap();
        let order: Vec<usize> = ["\"outline\"", "\"nodes\"", "\"wires\"", "\"bsp\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_for_leaf_records_the_outline() {
        let diagram = layout(&checked(RawTerm::gen("f")), &LayoutOptions::default());
        let value: serde_json::Value = serde_json::from_slice(&to_json(&diagram)).unwrap();
        assert_eq!(value["outline"]["l"], serde_json::json!(1.0));
        assert_eq!(value["outline"]["r"], serde_json::json!(2.0));
        assert_eq!(value["outline"]["w"], serde_json::json!(2.0));
    }

    #[test]
    fn json_bsp_root_of_split_merge_is_a_seq_split_at_two() {
        let diagram = layout(&split_merge(), &LayoutOptions::default());
        let value: serde_json::Value = serde_json::from_slice(&to_json(&diagram)).unwrap();
        assert_eq!(value["bsp"]["kind"], "seq");
        assert_eq!(value["bsp"]["x"], serde_json::json!(2.0));
        assert_eq!(value["bsp"]["left"]["kind"], "ten");
    }

    #[test]
    fn json_distinguishes_structurally_distinct_terms() {
        let corpus = [
            RawTerm::gen("f"),
            RawTerm::gen("g"),
            RawTerm::gen("h"),
            RawTerm::id(["x"]),
            RawTerm::id(["x", "x"]),
            RawTerm::ten(RawTerm::gen("f"), RawTerm::gen("g")),
            RawTerm::ten(RawTerm::gen("g"), RawTerm::gen("f")),
            RawTerm::seq(RawTerm::gen("f"), RawTerm::gen("g")),
            RawTerm::seq(
                RawTerm::ten(RawTerm::gen("f"), RawTerm::gen("g")),
                RawTerm::ten(RawTerm::gen("f"), RawTerm::gen("g")),
            ),
        ];
        let mut rendered: Vec<Vec<u8>> = Vec::new();
        for term in corpus {
            let diagram = layout(&checked(term), &LayoutOptions::default());
            rendered.push(to_json(&diagram));
        }
        for i in 0..rendered.len() {
            for j in (i + 1)..rendered.len() {
                assert_ne!(rendered[i], rendered[j], "terms {i} and {j} rendered equal");
            }
        }
    }

    #[test]
    fn naive_diagrams_render_too() {
        let diagram = layout_naive(&split_merge());
        let style = RenderStyle {
            show_outline: true,
            ..RenderStyle::default()
        };
        let svg = String::from_utf8(to_svg(&diagram, &style)).unwrap();
        assert_eq!(count(&svg, "<rect "), 4);
        assert!(count(&svg, "<line ") >= 1, "seams drawn when requested");
    }

    #[test]
    fn labels_are_escaped() {
        use crate::geometry::{Bezier, EndpointRole, Point, Trapezoid, Wire};
        use crate::layout::{BspNode, NodeMark};
        let diagram = Diagram {
            outline: Trapezoid::new(1.0, 1.0, 1.0),
            tree: BspNode::Region {
                nodes: vec![0],
                wires: vec![0],
            },
            wires: vec![Wire::single(
                Bezier::horizontal_handles(Point::new(0.0, 0.5), Point::new(1.0, 0.5), 0.3),
                EndpointRole::BoundaryLeft,
                EndpointRole::BoundaryRight,
            )],
            nodes: vec![NodeMark {
                anchor: Point::new(0.5, 0.5),
                label: "a<b&_c".to_string(),
                half_extent: (0.25, 0.25),
            }],
        };
        let svg = String::from_utf8(to_svg(&diagram, &RenderStyle::default())).unwrap();
        assert!(svg.contains("a&lt;b&amp;_c"));
        let tikz = to_tikz(&diagram, &RenderStyle::default());
        assert!(tikz.contains("a<b\\&\\_c"));
        let json: serde_json::Value = serde_json::from_slice(&to_json(&diagram)).unwrap();
        assert_eq!(json["nodes"][0]["label"], "a<b&_c");
    }
}
