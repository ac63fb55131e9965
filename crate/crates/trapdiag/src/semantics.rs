//! Evaluation of terms under pluggable semantics.
//!
//! [`fold`] performs the same structural recursion the layout engine uses,
//! parameterized by a [`MonoidalAlgebra`]: drawing and evaluating are the
//! same compilation pass with different handlers. The bundled backend maps
//! every term to an exact rational matrix, with sequential composition as
//! matrix product and tensoring as direct sum.

use crate::term::{Term, TermNode};
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Handlers for one fold over a typechecked term.
///
/// Handlers must be total on typechecked inputs; partial backends validate
/// up front (see [`eval_matrix`]).
pub trait MonoidalAlgebra {
    type Value;

    fn on_gen(&self, name: &str, src: &[String], tgt: &[String]) -> Self::Value;
    fn on_id(&self, objects: &[String]) -> Self::Value;
    fn on_seq(&self, left: Self::Value, right: Self::Value) -> Self::Value;
    fn on_ten(&self, top: Self::Value, bottom: Self::Value) -> Self::Value;
}

/// Structural recursion over a typechecked term.
pub fn fold<A: MonoidalAlgebra>(term: &Term, alg: &A) -> A::Value {
    match term.node() {
        TermNode::Gen(name) => alg.on_gen(name, term.src(), term.tgt()),
        TermNode::Id(objects) => alg.on_id(objects),
        TermNode::Seq(l, r) => {
            let left = fold(l, alg);
            let right = fold(r, alg);
            alg.on_seq(left, right)
        }
        TermNode::Ten(l, r) => {
            let top = fold(l, alg);
            let bottom = fold(r, alg);
            alg.on_ten(top, bottom)
        }
    }
}

/// Counts generator leaves; identities contribute nothing.
pub struct NodeCountAlgebra;

impl MonoidalAlgebra for NodeCountAlgebra {
    type Value = usize;

    fn on_gen(&self, _: &str, _: &[String], _: &[String]) -> usize {
        1
    }
    fn on_id(&self, _: &[String]) -> usize {
        0
    }
    fn on_seq(&self, left: usize, right: usize) -> usize {
        left + right
    }
    fn on_ten(&self, top: usize, bottom: usize) -> usize {
        top + bottom
    }
}

/// A dense matrix with exact rational entries, stored row-major.
///
/// For a matrix denoting a term, `rows` is the target arity and `cols` the
/// source arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixValue {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl MatrixValue {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        MatrixValue { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixValue {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixValue::zero(n, n);
        for i in 0..n {
            *m.entry_mut(i, i) = BigRational::one();
        }
        m
    }

    /// Builds a matrix from integer rows; handy in tests and examples.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| BigRational::from_integer(BigInt::from(v))))
            .collect();
        MatrixValue::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.cols + col]
    }

    fn entry_mut(&mut self, row: usize, col: usize) -> &mut BigRational {
        &mut self.entries[row * self.cols + col]
    }

    /// Matrix product `self * other`; requires `self.cols == other.rows`.
    pub fn mul(&self, other: &MatrixValue) -> MatrixValue {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = MatrixValue::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.entry(k, j);
                    *out.entry_mut(i, j) += add;
                }
            }
        }
        out
    }
}

impl fmt::Display for MatrixValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Block-diagonal combination: `a` in the top-left block, `b` in the
/// bottom-right, zeros elsewhere.
pub fn direct_sum(a: &MatrixValue, b: &MatrixValue) -> MatrixValue {
    let mut out = MatrixValue::zero(a.rows + b.rows, a.cols + b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            *out.entry_mut(i, j) = a.entry(i, j).clone();
        }
    }
    for i in 0..b.rows {
        for j in 0..b.cols {
            *out.entry_mut(a.rows + i, a.cols + j) = b.entry(i, j).clone();
        }
    }
    out
}

/// A matrix for every generator, keyed by name.
pub type MatrixAssignment = BTreeMap<String, MatrixValue>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("no matrix assigned to generator `{0}`")]
    MissingGenerator(String),
    #[error(
        "matrix for `{gen}` has shape {found_rows}x{found_cols}, expected {expected_rows}x{expected_cols}"
    )]
    ShapeMismatch {
        gen: String,
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("invalid matrix entry for `{gen}`: {detail}")]
    InvalidEntry { gen: String, detail: String },
    #[error("semantics file is not of the form {{\"gens\": {{...}}}}: {0}")]
    MalformedFile(String),
}

struct MatrixAlgebra<'a> {
    assignment: &'a MatrixAssignment,
}

impl MonoidalAlgebra for MatrixAlgebra<'_> {
    type Value = MatrixValue;

    fn on_gen(&self, name: &str, _: &[String], _: &[String]) -> MatrixValue {
        self.assignment
            .get(name)
            .expect("assignment validated before folding")
            .clone()
    }

    fn on_id(&self, objects: &[String]) -> MatrixValue {
        MatrixValue::identity(objects.len())
    }

    // `left` happens first: matrices act on column vectors, so the later
    // factor goes on the left of the product.
    fn on_seq(&self, left: MatrixValue, right: MatrixValue) -> MatrixValue {
        right.mul(&left)
    }

    fn on_ten(&self, top: MatrixValue, bottom: MatrixValue) -> MatrixValue {
        direct_sum(&top, &bottom)
    }
}

fn validate_assignment(term: &Term, assignment: &MatrixAssignment) -> Result<(), SemanticsError> {
    match term.node() {
        TermNode::Gen(name) => {
            let matrix = assignment
                .get(name)
                .ok_or_else(|| SemanticsError::MissingGenerator(name.clone()))?;
            let expected_rows = term.tgt().len();
            let expected_cols = term.src().len();
            if matrix.rows != expected_rows || matrix.cols != expected_cols {
                return Err(SemanticsError::ShapeMismatch {
                    gen: name.clone(),
                    expected_rows,
                    expected_cols,
                    found_rows: matrix.rows,
                    found_cols: matrix.cols,
                });
            }
            Ok(())
        }
        TermNode::Id(_) => Ok(()),
        TermNode::Seq(l, r) | TermNode::Ten(l, r) => {
            validate_assignment(l, assignment)?;
            validate_assignment(r, assignment)
        }
    }
}

/// Evaluates a term in the matrix backend.
///
/// Every generator occurring in the term must be assigned a matrix of shape
/// target-arity x source-arity; the result then has the term's own shape.
pub fn eval_matrix(term: &Term, assignment: &MatrixAssignment) -> Result<MatrixValue, SemanticsError> {
    validate_assignment(term, assignment)?;
    Ok(fold(term, &MatrixAlgebra { assignment }))
}

fn rational_from_json(value: &serde_json::Value) -> Result<BigRational, String> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                Err(format!("`{n}` is not an integer; use a \"p/q\" string for fractions"))
            }
        }
        serde_json::Value::String(s) => {
            let (num, den) = match s.split_once('/') {
                Some((num, den)) => (num.trim(), den.trim()),
                None => (s.trim(), "1"),
            };
            let num = BigInt::from_str(num).map_err(|e| format!("bad numerator in `{s}`: {e}"))?;
            let den = BigInt::from_str(den).map_err(|e| format!("bad denominator in `{s}`: {e}"))?;
            if den.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(BigRational::new(num, den))
        }
        other => Err(format!("expected number or \"p/q\" string, found {other}")),
    }
}

/// Parses a matrix assignment file: `{"gens": {"f": [[1, 2], ["1/2", 0]]}}`.
///
/// Entries are integers or `"p/q"` strings. Shapes are validated later,
/// against the term being compiled.
pub fn parse_assignment(json: &serde_json::Value) -> Result<MatrixAssignment, SemanticsError> {
    let gens = json
        .get("gens")
        .and_then(|v| v.as_object())
        .ok_or_else(|| SemanticsError::MalformedFile("missing `gens` object".to_string()))?;
    let mut assignment = MatrixAssignment::new();
    for (name, rows_value) in gens {
        let rows = rows_value.as_array().ok_or_else(|| SemanticsError::InvalidEntry {
            gen: name.clone(),
            detail: "matrix must be an array of rows".to_string(),
        })?;
        if rows.is_empty() {
            return Err(SemanticsError::InvalidEntry {
                gen: name.clone(),
                detail: "matrix must have at least one row".to_string(),
            });
        }
        let mut cols = None;
        let mut entries = Vec::new();
        for row_value in rows {
            let row = row_value.as_array().ok_or_else(|| SemanticsError::InvalidEntry {
                gen: name.clone(),
                detail: "each row must be an array".to_string(),
            })?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(SemanticsError::InvalidEntry {
                        gen: name.clone(),
                        detail: "rows have differing lengths".to_string(),
                    })
                }
                _ => {}
            }
            for entry in row {
                entries.push(rational_from_json(entry).map_err(|detail| {
                    SemanticsError::InvalidEntry {
                        gen: name.clone(),
                        detail,
                    }
                })?);
            }
        }
        let cols = cols.unwrap_or(0);
        if cols == 0 {
            return Err(SemanticsError::InvalidEntry {
                gen: name.clone(),
                detail: "matrix must have at least one column".to_string(),
            });
        }
        assignment.insert(name.clone(), MatrixValue::new(rows.len(), cols, entries));
    }
    Ok(assignment)
}

/// Renders a matrix as JSON with the same entry conventions as the
/// assignment file: integers as numbers, other rationals as `"p/q"`.
pub fn matrix_to_json(matrix: &MatrixValue) -> serde_json::Value {
    let mut rows = Vec::with_capacity(matrix.rows);
    for i in 0..matrix.rows {
        let mut row = Vec::with_capacity(matrix.cols);
        for j in 0..matrix.cols {
            let entry = matrix.entry(i, j);
            let as_number = entry
                .is_integer()
                .then(|| entry.to_integer())
                .and_then(|n| i64::try_from(&n).ok())
                .map(serde_json::Value::from);
            row.push(as_number.unwrap_or_else(|| serde_json::Value::from(entry.to_string())));
        }
        rows.push(serde_json::Value::Array(row));
    }
    serde_json::json!({
        "rows": matrix.rows,
        "cols": matrix.cols,
        "entries": rows,
    })
}
