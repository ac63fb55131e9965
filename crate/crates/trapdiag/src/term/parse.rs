//! Line-oriented parser for the `.sd` input format.
//!
//! ```text
//! ob x                     # declare an object symbol
//! gen f: x -> x x          # declare a generator with its boundaries
//! term main = (f * g) ; (f * g)
//! ```
//!
//! `*` (tensor) binds tighter than `;`; both are left-associative.
//! `#` starts a comment that runs to the end of the line. Declarations must
//! precede their first use.

use super::{RawTerm, Signature};
use std::fmt;
use thiserror::Error;

/// A named term together with the line it was declared on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDef {
    pub name: String,
    pub line: usize,
    pub term: RawTerm,
}

/// A parsed input file: the signature and the named terms in file order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub signature: Signature,
    pub terms: Vec<TermDef>,
}

impl Document {
    pub fn term(&self, name: &str) -> Option<&RawTerm> {
        self.terms.iter().find(|d| d.name == name).map(|d| &d.term)
    }

    pub fn term_def(&self, name: &str) -> Option<&TermDef> {
        self.terms.iter().find(|d| d.name == name)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("reference to undeclared object symbol `{0}`")]
    UndeclaredObject(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Arrow,
    Equals,
    Semi,
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Star => write!(f, "`*`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            ':' => {
                toks.push((Tok::Colon, col));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Equals, col));
                i += 1;
            }
            ';' => {
                toks.push((Tok::Semi, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, col));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, col));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                toks.push((Tok::Arrow, col));
                i += 2;
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(word), col));
            }
            c => {
                return Err(ParseError {
                    line: line_no,
                    col,
                    kind: ParseErrorKind::UnexpectedChar(c),
                })
            }
        }
    }
    Ok(toks)
}

/// Cursor over one line of tokens.
struct Line<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line_no: usize,
    /// Column just past the final token, for errors at end of line.
    end_col: usize,
}

impl<'a> Line<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<&(Tok, usize)> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_col)
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of line".to_string(),
        };
        ParseError {
            line: self.line_no,
            col: self.col(),
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found,
            },
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some((Tok::Ident(s), _)) = self.next() else {
                    unreachable!()
                };
                Ok(s.clone())
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect_tok(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.next();
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }
}

/// Parses a full `.sd` file into a signature and named terms.
///
/// Object symbols referenced by `gen` boundaries and `id[...]` lists must
/// already be declared; generator names inside term expressions are resolved
/// later by the typechecker.
pub fn parse_file(text: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(raw_line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let end_col = raw_line.chars().count() + 1;
        let mut line = Line {
            toks: &toks,
            pos: 0,
            line_no,
            end_col,
        };
        let keyword_col = line.col();
        let keyword = line.expect_ident("`ob`, `gen` or `term`")?;
        match keyword.as_str() {
            "ob" => parse_ob(&mut line, &mut doc)?,
            "gen" => parse_gen(&mut line, &mut doc)?,
            "term" => parse_term_line(&mut line, &mut doc)?,
            other => {
                return Err(ParseError {
                    line: line_no,
                    col: keyword_col,
                    kind: ParseErrorKind::Unexpected {
                        expected: "`ob`, `gen` or `term`".to_string(),
                        found: format!("`{other}`"),
                    },
                })
            }
        }
        if !line.at_end() {
            return Err(line.error("end of line"));
        }
    }
    Ok(doc)
}

fn parse_ob(line: &mut Line, doc: &mut Document) -> Result<(), ParseError> {
    let col = line.col();
    let name = line.expect_ident("object name")?;
    doc.signature.add_object(name.clone()).map_err(|_| ParseError {
        line: line.line_no,
        col,
        kind: ParseErrorKind::Duplicate(name),
    })
}

fn parse_objlist(line: &mut Line, doc: &Document, stop: Option<&Tok>) -> Result<Vec<String>, ParseError> {
    let mut objects = Vec::new();
    loop {
        match line.peek() {
            Some(Tok::Ident(_)) => {
                let col = line.col();
                let name = line.expect_ident("object symbol")?;
                if !doc.signature.has_object(&name) {
                    return Err(ParseError {
                        line: line.line_no,
                        col,
                        kind: ParseErrorKind::UndeclaredObject(name),
                    });
                }
                objects.push(name);
            }
            t if objects.is_empty() => {
                let _ = t;
                return Err(line.error("object symbol"));
            }
            t => {
                if let Some(stop) = stop {
                    if t != Some(stop) {
                        return Err(line.error(&format!("object symbol or {stop}")));
                    }
                }
                break;
            }
        }
    }
    Ok(objects)
}

fn parse_gen(line: &mut Line, doc: &mut Document) -> Result<(), ParseError> {
    let name_col = line.col();
    let name = line.expect_ident("generator name")?;
    line.expect_tok(Tok::Colon)?;
    let src = parse_objlist(line, doc, Some(&Tok::Arrow))?;
    line.expect_tok(Tok::Arrow)?;
    let tgt = parse_objlist(line, doc, None)?;
    doc.signature
        .add_generator(name.clone(), src, tgt)
        .map_err(|_| ParseError {
            line: line.line_no,
            col: name_col,
            kind: ParseErrorKind::Duplicate(name),
        })
}

fn parse_term_line(line: &mut Line, doc: &mut Document) -> Result<(), ParseError> {
    let name_col = line.col();
    let name = line.expect_ident("term name")?;
    if doc.terms.iter().any(|d| d.name == name) {
        return Err(ParseError {
            line: line.line_no,
            col: name_col,
            kind: ParseErrorKind::Duplicate(name),
        });
    }
    line.expect_tok(Tok::Equals)?;
    let term = parse_seq(line, doc)?;
    doc.terms.push(TermDef {
        name,
        line: line.line_no,
        term,
    });
    Ok(())
}

// expr := tensor (";" tensor)*     left-associative
fn parse_seq(line: &mut Line, doc: &Document) -> Result<RawTerm, ParseError> {
    let mut term = parse_tensor(line, doc)?;
    while line.peek() == Some(&Tok::Semi) {
        line.next();
        let rhs = parse_tensor(line, doc)?;
        term = RawTerm::seq(term, rhs);
    }
    Ok(term)
}

// tensor := atom ("*" atom)*       left-associative, binds tighter than ";"
fn parse_tensor(line: &mut Line, doc: &Document) -> Result<RawTerm, ParseError> {
    let mut term = parse_atom(line, doc)?;
    while line.peek() == Some(&Tok::Star) {
        line.next();
        let rhs = parse_atom(line, doc)?;
        term = RawTerm::ten(term, rhs);
    }
    Ok(term)
}

fn parse_atom(line: &mut Line, doc: &Document) -> Result<RawTerm, ParseError> {
    match line.peek() {
        Some(Tok::LParen) => {
            line.next();
            let term = parse_seq(line, doc)?;
            line.expect_tok(Tok::RParen)?;
            Ok(term)
        }
        Some(Tok::Ident(name)) if name == "id" => {
            line.next();
            line.expect_tok(Tok::LBracket)?;
            let objects = parse_objlist(line, doc, Some(&Tok::RBracket))?;
            line.expect_tok(Tok::RBracket)?;
            Ok(RawTerm::Id(objects))
        }
        Some(Tok::Ident(_)) => {
            let name = line.expect_ident("generator name")?;
            Ok(RawTerm::Gen(name))
        }
        _ => Err(line.error("term expression")),
    }
}
