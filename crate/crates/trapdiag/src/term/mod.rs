//! Signatures, terms, parsing and typechecking.
//!
//! A signature declares object symbols and morphism symbols with typed
//! source/target boundaries. Terms are built from generators, identities,
//! sequential composition `;` and tensor `*`; typechecking annotates every
//! subterm with its boundary lists and verifies that sequential composition
//! only joins matching boundaries.

mod parse;
pub mod random;

pub use parse::{parse_file, Document, ParseError, TermDef};

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Source and target boundary of a morphism symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenType {
    pub src: Vec<String>,
    pub tgt: Vec<String>,
}

/// A monoidal signature: object symbols plus typed morphism symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    objects: Vec<String>,
    generators: BTreeMap<String, GenType>,
}

/// Errors raised while building a signature programmatically.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate object symbol `{0}`")]
    DuplicateObject(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{gen}` references undeclared object symbol `{object}`")]
    UndeclaredObject { gen: String, object: String },
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> Result<(), SignatureError> {
        let name = name.into();
        if self.objects.contains(&name) {
            return Err(SignatureError::DuplicateObject(name));
        }
        self.objects.push(name);
        Ok(())
    }

    pub fn add_generator(
        &mut self,
        name: impl Into<String>,
        src: Vec<String>,
        tgt: Vec<String>,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        if self.generators.contains_key(&name) {
            return Err(SignatureError::DuplicateGenerator(name));
        }
        for object in src.iter().chain(tgt.iter()) {
            if !self.objects.iter().any(|o| o == object) {
                return Err(SignatureError::UndeclaredObject {
                    gen: name,
                    object: object.clone(),
                });
            }
        }
        self.generators.insert(name, GenType { src, tgt });
        Ok(())
    }

    pub fn has_object(&self, name: &str) -> bool {
        self.objects.iter().any(|o| o == name)
    }

    pub fn generator(&self, name: &str) -> Option<&GenType> {
        self.generators.get(name)
    }

    pub fn objects(&self) -> impl Iterator<Item = &str> {
        self.objects.iter().map(String::as_str)
    }

    /// Generators in name order.
    pub fn generators(&self) -> impl Iterator<Item = (&str, &GenType)> {
        self.generators.iter().map(|(n, t)| (n.as_str(), t))
    }
}

/// An untyped term as produced by the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Gen(String),
    Id(Vec<String>),
    Seq(Box<RawTerm>, Box<RawTerm>),
    Ten(Box<RawTerm>, Box<RawTerm>),
}

impl RawTerm {
    pub fn seq(left: RawTerm, right: RawTerm) -> RawTerm {
        RawTerm::Seq(Box::new(left), Box::new(right))
    }

    pub fn ten(top: RawTerm, bottom: RawTerm) -> RawTerm {
        RawTerm::Ten(Box::new(top), Box::new(bottom))
    }

    pub fn gen(name: impl Into<String>) -> RawTerm {
        RawTerm::Gen(name.into())
    }

    pub fn id<S: Into<String>>(objects: impl IntoIterator<Item = S>) -> RawTerm {
        RawTerm::Id(objects.into_iter().map(Into::into).collect())
    }

    fn precedence(&self) -> u8 {
        match self {
            RawTerm::Seq(..) => 1,
            RawTerm::Ten(..) => 2,
            RawTerm::Gen(_) | RawTerm::Id(_) => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            RawTerm::Gen(name) => write!(f, "{name}")?,
            RawTerm::Id(objects) => write!(f, "id[{}]", objects.join(" "))?,
            RawTerm::Seq(l, r) => {
                l.fmt_prec(f, 1)?;
                write!(f, " ; ")?;
                r.fmt_prec(f, 2)?;
            }
            RawTerm::Ten(l, r) => {
                l.fmt_prec(f, 2)?;
                write!(f, " * ")?;
                r.fmt_prec(f, 3)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Prints the term in the input syntax; parsing the output reproduces the
/// same tree.
impl fmt::Display for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 1)
    }
}

/// One step into a term tree, used to report where an error occurred.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    SeqLeft,
    SeqRight,
    TenTop,
    TenBottom,
}

impl Branch {
    fn as_str(&self) -> &'static str {
        match self {
            Branch::SeqLeft => "left",
            Branch::SeqRight => "right",
            Branch::TenTop => "top",
            Branch::TenBottom => "bottom",
        }
    }
}

/// Path from the root of a term to a subterm.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermPath(pub Vec<Branch>);

impl fmt::Display for TermPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "root")
        } else {
            let parts: Vec<&str> = self.0.iter().map(Branch::as_str).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Typechecking errors.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown generator `{name}` at {path}")]
    UnknownGenerator { name: String, path: TermPath },
    #[error(
        "composition mismatch at {path}: left side produces [{}] but right side consumes [{}]",
        .expected.join(" "),
        .found.join(" ")
    )]
    CompositionMismatch {
        expected: Vec<String>,
        found: Vec<String>,
        path: TermPath,
    },
    #[error("zero-arity subterm at {path}: boundaries must have at least one object")]
    ZeroArity { path: TermPath },
}

/// A typechecked term: every node carries its source and target boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    node: TermNode,
    src: Vec<String>,
    tgt: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermNode {
    Gen(String),
    Id(Vec<String>),
    Seq(Box<Term>, Box<Term>),
    Ten(Box<Term>, Box<Term>),
}

impl Term {
    pub fn node(&self) -> &TermNode {
        &self.node
    }

    pub fn src(&self) -> &[String] {
        &self.src
    }

    pub fn tgt(&self) -> &[String] {
        &self.tgt
    }

    /// Source and target arity: the lengths of the boundary lists.
    pub fn arity(&self) -> (usize, usize) {
        (self.src.len(), self.tgt.len())
    }

    /// Number of generator leaves.
    pub fn gen_count(&self) -> usize {
        match &self.node {
            TermNode::Gen(_) => 1,
            TermNode::Id(_) => 0,
            TermNode::Seq(l, r) | TermNode::Ten(l, r) => l.gen_count() + r.gen_count(),
        }
    }

    /// The untyped view of this term.
    pub fn to_raw(&self) -> RawTerm {
        match &self.node {
            TermNode::Gen(name) => RawTerm::Gen(name.clone()),
            TermNode::Id(objects) => RawTerm::Id(objects.clone()),
            TermNode::Seq(l, r) => RawTerm::seq(l.to_raw(), r.to_raw()),
            TermNode::Ten(l, r) => RawTerm::ten(l.to_raw(), r.to_raw()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_raw().fmt(f)
    }
}

/// Annotates every subterm with its boundaries and checks the composition
/// rule `tgt(left) = src(right)` symbol by symbol. Subterms with an empty
/// boundary on either side are rejected.
pub fn typecheck(term: &RawTerm, sig: &Signature) -> Result<Term, TypeError> {
    let mut path = Vec::new();
    check(term, sig, &mut path)
}

fn check(term: &RawTerm, sig: &Signature, path: &mut Vec<Branch>) -> Result<Term, TypeError> {
    let checked = match term {
        RawTerm::Gen(name) => {
            let ty = sig
                .generator(name)
                .ok_or_else(|| TypeError::UnknownGenerator {
                    name: name.clone(),
                    path: TermPath(path.clone()),
                })?;
            Term {
                node: TermNode::Gen(name.clone()),
                src: ty.src.clone(),
                tgt: ty.tgt.clone(),
            }
        }
        RawTerm::Id(objects) => Term {
            node: TermNode::Id(objects.clone()),
            src: objects.clone(),
            tgt: objects.clone(),
        },
        RawTerm::Seq(l, r) => {
            path.push(Branch::SeqLeft);
            let left = check(l, sig, path)?;
            path.pop();
            path.push(Branch::SeqRight);
            let right = check(r, sig, path)?;
            path.pop();
            if left.tgt != right.src {
                return Err(TypeError::CompositionMismatch {
                    expected: left.tgt.clone(),
                    found: right.src.clone(),
                    path: TermPath(path.clone()),
                });
            }
            let src = left.src.clone();
            let tgt = right.tgt.clone();
            Term {
                node: TermNode::Seq(Box::new(left), Box::new(right)),
                src,
                tgt,
            }
        }
        RawTerm::Ten(l, r) => {
            path.push(Branch::TenTop);
            let top = check(l, sig, path)?;
            path.pop();
            path.push(Branch::TenBottom);
            let bottom = check(r, sig, path)?;
            path.pop();
            let mut src = top.src.clone();
            src.extend_from_slice(&bottom.src);
            let mut tgt = top.tgt.clone();
            tgt.extend_from_slice(&bottom.tgt);
            Term {
                node: TermNode::Ten(Box::new(top), Box::new(bottom)),
                src,
                tgt,
            }
        }
    };
    if checked.src.is_empty() || checked.tgt.is_empty() {
        return Err(TypeError::ZeroArity {
            path: TermPath(path.clone()),
        });
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::random::{break_random_seq, paper_signature, random_term, TermGenConfig};
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn xs(n: usize) -> Vec<String> {
        vec!["x".to_string(); n]
    }

    #[test]
    fn split_merge_term_typechecks_with_matching_boundaries() {
        let sig = paper_signature();
        let pair = RawTerm::ten(RawTerm::gen("f"), RawTerm::gen("g"));
        let term = RawTerm::seq(pair.clone(), pair);
        let checked = typecheck(&term, &sig).unwrap();
        assert_eq!(checked.src(), &xs(3)[..]);
        assert_eq!(checked.tgt(), &xs(3)[..]);
        assert_eq!(checked.arity(), (3, 3));
    }

    #[test]
    fn mismatched_composition_is_rejected() {
        let sig = paper_signature();
        let term = RawTerm::seq(RawTerm::gen("f"), RawTerm::gen("f"));
        let err = typecheck(&term, &sig).unwrap_err();
        assert_eq!(
            err,
            TypeError::CompositionMismatch {
                expected: xs(2),
                found: xs(1),
                path: TermPath::default(),
            }
        );
    }

    #[test]
    fn identity_composition_typechecks() {
        let sig = paper_signature();
        let term = RawTerm::seq(RawTerm::id(["x"]), RawTerm::id(["x"]));
        let checked = typecheck(&term, &sig).unwrap();
        assert_eq!(checked.arity(), (1, 1));
    }

    #[test]
    fn unknown_generator_reports_path() {
        let sig = paper_signature();
        let term = RawTerm::seq(RawTerm::gen("f"), RawTerm::gen("nope"));
        match typecheck(&term, &sig).unwrap_err() {
            TypeError::UnknownGenerator { name, path } => {
                assert_eq!(name, "nope");
                assert_eq!(path.to_string(), "right");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_identity_is_rejected() {
        let sig = paper_signature();
        let err = typecheck(&RawTerm::Id(Vec::new()), &sig).unwrap_err();
        assert!(matches!(err, TypeError::ZeroArity { .. }));
    }

    #[test]
    fn arity_concatenates_for_tensor() {
        let sig = paper_signature();
        let term = RawTerm::ten(RawTerm::gen("f"), RawTerm::gen("f"));
        let checked = typecheck(&term, &sig).unwrap();
        // List concatenation oracle: src = src(f)+src(f), tgt = tgt(f)+tgt(f).
        assert_eq!(checked.arity(), (1 + 1, 2 + 2));
    }

    #[test]
    fn arity_of_identity_matches_object_count() {
        let sig = paper_signature();
        let checked = typecheck(&RawTerm::id(["x", "x", "x"]), &sig).unwrap();
        assert_eq!(checked.arity(), (3, 3));
    }

    #[test]
    fn typecheck_is_total_on_generated_terms_and_rejects_broken_seqs() {
        let sig = paper_signature();
        let cfg = TermGenConfig::default();
        let mut rng = StdRng::seed_from_u64(11);
        let mut broken_seen = 0;
        for _ in 0..200 {
            let term = random_term(&mut rng, &sig, &cfg);
            let checked = typecheck(&term, &sig).expect("generated terms are well typed");
            let (l, r) = checked.arity();
            assert!(l >= 1 && r >= 1);
            if let Some(broken) = break_random_seq(&mut rng, &term) {
                broken_seen += 1;
                assert!(
                    matches!(
                        typecheck(&broken, &sig),
                        Err(TypeError::CompositionMismatch { .. })
                    ),
                    "mutated term must fail: {broken}"
                );
            }
        }
        assert!(broken_seen > 50, "mutation should hit plenty of seq nodes");
    }

    #[test]
    fn boundary_lengths_add_up_on_generated_terms() {
        let sig = paper_signature();
        let cfg = TermGenConfig::default();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let term = random_term(&mut rng, &sig, &cfg);
            let checked = typecheck(&term, &sig).unwrap();
            check_arity_sums(&checked);
        }
    }

    fn check_arity_sums(term: &Term) {
        match term.node() {
            TermNode::Seq(l, r) => {
                assert_eq!(term.src().len(), l.src().len());
                assert_eq!(term.tgt().len(), r.tgt().len());
                check_arity_sums(l);
                check_arity_sums(r);
            }
            TermNode::Ten(l, r) => {
                assert_eq!(term.src().len(), l.src().len() + r.src().len());
                assert_eq!(term.tgt().len(), l.tgt().len() + r.tgt().len());
                check_arity_sums(l);
                check_arity_sums(r);
            }
            _ => {}
        }
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let sig = paper_signature();
        let cfg = TermGenConfig::default();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let term = random_term(&mut rng, &sig, &cfg);
            let printed = format!("term t = {term}\n");
            let source = format!("ob x\n{printed}");
            let doc = parse_file(&source).expect("printed term parses");
            assert_eq!(doc.term("t").unwrap(), &term, "round trip of `{printed}`");
        }
    }

    #[test]
    fn signature_rejects_duplicates_and_undeclared_objects() {
        let mut sig = Signature::new();
        sig.add_object("x").unwrap();
        assert_eq!(
            sig.add_object("x"),
            Err(SignatureError::DuplicateObject("x".into()))
        );
        sig.add_generator("f", vec!["x".into()], vec!["x".into()])
            .unwrap();
        assert!(matches!(
            sig.add_generator("f", vec!["x".into()], vec!["x".into()]),
            Err(SignatureError::DuplicateGenerator(_))
        ));
        assert_eq!(
            sig.add_generator("g", vec!["y".into()], vec!["x".into()]),
            Err(SignatureError::UndeclaredObject {
                gen: "g".into(),
                object: "y".into()
            })
        );
    }
}
