//! trapdiag compiles terms of a free monoidal category to rendered string
//! diagrams, and evaluates them under pluggable semantics.
//!
//! The pipeline is parse -> typecheck -> fold. The layout fold keeps every
//! diagram inside a right trapezoid whose side lengths equal the term's
//! arities, composing sub-diagrams with pinch, scale and shear maps so that
//! boundary strings always stay equidistant and seams always meet. The same
//! fold, with different handlers, evaluates terms as exact rational matrices
//! (composition as matrix product, tensor as direct sum).
//!
//! - [`term`]: signatures, the `.sd` input language, typechecking.
//! - [`geometry`]: trapezoids, plane maps, Bézier wires.
//! - [`layout`]: the trapezoid layout fold and the naive comparison layout.
//! - [`render`]: deterministic SVG, TikZ and JSON emitters.
//! - [`semantics`]: the generic fold and the matrix backend.
//! - [`cli`]: the `trapdiag` command-line tool.

pub mod cli;
pub mod geometry;
pub mod layout;
pub mod render;
pub mod semantics;
pub mod term;

pub use geometry::{Point, Trapezoid, Wire};
pub use layout::{layout, layout_naive, Diagram, LayoutOptions};
pub use render::{to_json, to_svg, to_tikz, RenderStyle};
pub use semantics::{eval_matrix, fold, MatrixValue, MonoidalAlgebra};
pub use term::{parse_file, typecheck, RawTerm, Signature, Term};
