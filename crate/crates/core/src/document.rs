//! Line-oriented text format for rings, spaces and operators.
//!
//! ```text
//! %IIPM v1
//! ring gf2k k=2 modulus=7 star=frobenius:1
//! space dim=2
//! gram
//! 0 2
//! 3 0
//! operator name=T
//! 1 0
//! 0 1
//! ```
//!
//! Elements are lowercase hex residue masks. The space block is optional;
//! without it operators live on `R^d` with the identity Gram matrix, `d`
//! taken from the first operator. Blank lines and `#` comments are ignored.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::matrix::Matrix;
use crate::operator::{Operator, OperatorError};
use crate::ring::{Elem, Ring, RingError, RingKind, RingSpec, Star};
use crate::space::{Space, SpaceError};

pub const MAGIC: &str = "%IIPM v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown directive {0:?}")]
    UnknownDirective(String),
    #[error("duplicate operator name {0:?}")]
    DuplicateName(String),
    #[error("invalid ring: {0}")]
    Ring(#[from] RingError),
    #[error("invalid space: {0}")]
    Space(#[from] SpaceError),
    #[error("invalid operator: {0}")]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    /// Short name of the failed check, e.g. `GramSingular`.
    pub fn check(&self) -> &'static str {
        match &self.kind {
            ParseErrorKind::Syntax(_) => "Syntax",
            ParseErrorKind::UnknownDirective(_) => "UnknownDirective",
            ParseErrorKind::DuplicateName(_) => "DuplicateName",
            ParseErrorKind::Ring(RingError::MaskOutOfRange { .. }) => "MaskOutOfRange",
            ParseErrorKind::Ring(RingError::Reducible(_)) => "ReducibleModulus",
            ParseErrorKind::Ring(_) => "Ring",
            ParseErrorKind::Space(SpaceError::GramSingular) => "GramSingular",
            ParseErrorKind::Space(SpaceError::GramNotHermitian) => "GramNotHermitian",
            ParseErrorKind::Space(_) => "Space",
            ParseErrorKind::Operator(_) => "Operator",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub ring: Ring,
    /// `Some` when the document carries an explicit space block.
    pub space: Option<Space>,
    pub operators: Vec<(String, Operator)>,
}

impl Document {
    pub fn new(ring: Ring, space: Option<Space>) -> Self {
        Document {
            ring,
            space,
            operators: Vec::new(),
        }
    }

    pub fn with_operator(mut self, name: impl Into<String>, op: Operator) -> Self {
        self.operators.push((name.into(), op));
        self
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    pub fn first_operator(&self) -> Option<&Operator> {
        self.operators.first().map(|(_, o)| o)
    }

    pub fn parse(text: &str) -> Result<Document, ParseError> {
        Parser::new(text).document()
    }
}

pub fn format_ring(ring: &Ring) -> String {
    format!("ring {ring}")
}

fn write_rows(f: &mut fmt::Formatter<'_>, m: &Matrix) -> fmt::Result {
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(|e| format!("{e:x}")).collect();
        writeln!(f, "{}", line.join(" "))?;
    }
    Ok(())
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{MAGIC}")?;
        writeln!(f, "{}", format_ring(&self.ring))?;
        if let Some(space) = &self.space {
            writeln!(f, "space dim={}", space.dim())?;
            writeln!(f, "gram")?;
            write_rows(f, space.gram())?;
        }
        for (name, op) in &self.operators {
            writeln!(f, "operator name={name}")?;
            write_rows(f, op.matrix())?;
        }
        Ok(())
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn key_value<'a>(token: &'a str, key: &str) -> Option<&'a str> {
    token.strip_prefix(key)?.strip_prefix('=')
}

/// Parses the body of a ring line (everything after `ring `).
pub fn parse_ring_spec(body: &str) -> Result<Ring, ParseErrorKind> {
    let tokens: Vec<&str> = body.split_whitespace().collect();
    let [kind, k, modulus, star] = tokens.as_slice() else {
        return Err(ParseErrorKind::Syntax(
            "expected `<gf2k|quotient> k=<int> modulus=<hex> star=<identity|frobenius:<m>>`".into(),
        ));
    };
    let kind = match *kind {
        "gf2k" => RingKind::Gf2k,
        "quotient" => RingKind::Quotient,
        other => return Err(ParseErrorKind::Syntax(format!("unknown ring kind {other:?}"))),
    };
    let degree = key_value(k, "k")
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| ParseErrorKind::Syntax(format!("bad degree {k:?}")))?;
    let modulus = key_value(modulus, "modulus")
        .and_then(|v| u32::from_str_radix(v, 16).ok())
        .ok_or_else(|| ParseErrorKind::Syntax(format!("bad modulus {modulus:?}")))?;
    let star = match key_value(star, "star") {
        Some("identity") => Star::Identity,
        Some(s) => match s.strip_prefix("frobenius:").and_then(|m| m.parse::<u32>().ok()) {
            Some(m) => Star::Frobenius(m),
            None => return Err(ParseErrorKind::Syntax(format!("bad star {s:?}"))),
        },
        None => return Err(ParseErrorKind::Syntax(format!("bad star {star:?}"))),
    };
    Ok(Ring::new(RingSpec {
        kind,
        degree,
        modulus,
        star,
    })?)
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Parser { lines, pos: 0 }
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |(n, _)| *n)
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied();
        self.pos += 1;
        item
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        let eof = self.last_line();
        self.next().ok_or_else(|| ParseError {
            line: eof,
            kind: ParseErrorKind::Syntax(format!("unexpected end of input, expected {what}")),
        })
    }

    fn row(&self, line: usize, text: &str, ring: Ring, width: Option<usize>) -> Result<Vec<Elem>, ParseError> {
        let err = |kind| ParseError { line, kind };
        let row = text
            .split_whitespace()
            .map(|tok| ring.from_hex(tok).map_err(|e| err(e.into())))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(w) = width {
            if row.len() != w {
                return Err(err(ParseErrorKind::Syntax(format!(
                    "expected {w} elements, found {}",
                    row.len()
                ))));
            }
        }
        Ok(row)
    }

    fn matrix(&mut self, ring: Ring, dim: Option<usize>, what: &str) -> Result<Matrix, ParseError> {
        let (line, first) = self.expect_line(what)?;
        let first = self.row(line, first, ring, dim)?;
        let d = first.len();
        let mut rows = vec![first];
        for _ in 1..d {
            let (line, text) = self.expect_line(what)?;
            rows.push(self.row(line, text, ring, Some(d))?);
        }
        Matrix::from_rows(ring, rows).map_err(|e| ParseError {
            line,
            kind: ParseErrorKind::Operator(e.into()),
        })
    }

    fn document(mut self) -> Result<Document, ParseError> {
        let (line, magic) = self.expect_line("header")?;
        if magic != MAGIC {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::Syntax(format!("expected header {MAGIC:?}")),
            });
        }
        let (line, ring_line) = self.expect_line("ring line")?;
        let ring = match ring_line.strip_prefix("ring ") {
            Some(body) => parse_ring_spec(body).map_err(|kind| ParseError { line, kind })?,
            None => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::Syntax("expected `ring ...`".into()),
                })
            }
        };
        let mut doc = Document::new(ring, None);
        let mut space: Option<Space> = None;
        while let Some((line, text)) = self.next() {
            let err = |kind| ParseError { line, kind };
            let mut words = text.split_whitespace();
            let directive = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            match directive {
                "space" => {
                    if space.is_some() || !doc.operators.is_empty() {
                        return Err(err(ParseErrorKind::Syntax(
                            "space block must appear once, before operators".into(),
                        )));
                    }
                    let dim = match rest.as_slice() {
                        [tok] => key_value(tok, "dim").and_then(|v| v.parse::<usize>().ok()),
                        _ => None,
                    }
                    .filter(|&d| d > 0)
                    .ok_or_else(|| err(ParseErrorKind::Syntax("expected `space dim=<d>`".into())))?;
                    let (gline, g) = self.expect_line("gram")?;
                    if g != "gram" {
                        return Err(ParseError {
                            line: gline,
                            kind: ParseErrorKind::Syntax("expected `gram`".into()),
                        });
                    }
                    let gram = self.matrix(ring, Some(dim), "gram row")?;
                    let s = Space::new(ring, dim, gram).map_err(|e| err(e.into()))?;
                    space = Some(s.clone());
                    doc.space = Some(s);
                }
                "operator" => {
                    let name = match rest.as_slice() {
                        [tok] => key_value(tok, "name").filter(|n| is_ident(n)),
                        _ => None,
                    }
                    .ok_or_else(|| err(ParseErrorKind::Syntax("expected `operator name=<ident>`".into())))?;
                    if doc.operator(name).is_some() {
                        return Err(err(ParseErrorKind::DuplicateName(name.to_string())));
                    }
                    let dim = space.as_ref().map(Space::dim);
                    let m = self.matrix(ring, dim, "operator row")?;
                    let s = match &space {
                        Some(s) => s.clone(),
                        None => {
                            let s = Space::standard(ring, m.rows()).map_err(|e| err(e.into()))?;
                            space = Some(s.clone());
                            s
                        }
                    };
                    let op = Operator::new(s, m).map_err(|e| err(e.into()))?;
                    doc.operators.push((name.to_string(), op));
                }
                other => return Err(err(ParseErrorKind::UnknownDirective(other.to_string()))),
            }
        }
        Ok(doc)
    }
}

/// Random hermitian invertible Gram matrix: `M + star(Mᵀ)` plus a diagonal of
/// star-fixed elements, resampled until invertible.
pub fn random_gram(ring: Ring, dim: usize, rng: &mut impl Rng) -> Matrix {
    let fixed: Vec<Elem> = ring.elements().filter(|&a| ring.star(a) == a).collect();
    loop {
        let m = Matrix::from_fn(ring, dim, dim, |_, _| {
            ring.elem(rng.gen_range(0..ring.size()) as u32).expect("in range")
        });
        let mut g = m.add(&m.transpose().star_entries()).expect("square");
        for i in 0..dim {
            let a = fixed[rng.gen_range(0..fixed.len())];
            g.set(i, i, ring.add(g.get(i, i), a));
        }
        if g.det().is_ok_and(|d| ring.is_unit(d)) {
            return g;
        }
    }
}

/// Random document for round-trip testing: one of a fixed set of rings, an
/// optional random Gram block and up to three arbitrary operators.
pub fn random_document(rng: &mut impl Rng) -> Document {
    let specs = [
        RingSpec::gf2k(1, 0b11, Star::Identity),
        RingSpec::gf2k(2, 0b111, Star::Identity),
        RingSpec::gf2k(2, 0b111, Star::Frobenius(1)),
        RingSpec::gf2k(3, 0b1011, Star::Identity),
        RingSpec::gf2k(4, 0b10011, Star::Frobenius(2)),
        RingSpec::gf2k(8, 0x11b, Star::Frobenius(4)),
        RingSpec::quotient(2, 0b110),
        RingSpec::quotient(3, 0b1111),
    ];
    let ring = Ring::new(specs[rng.gen_range(0..specs.len())]).expect("valid spec");
    let dim = rng.gen_range(1..=4);
    let space = if rng.gen_bool(0.5) {
        Space::new(ring, dim, random_gram(ring, dim, rng)).expect("hermitian invertible")
    } else {
        Space::standard(ring, dim).expect("dim > 0")
    };
    let explicit = !space.gram().is_identity() || rng.gen_bool(0.5);
    let mut doc = Document::new(ring, explicit.then(|| space.clone()));
    for i in 0..rng.gen_range(usize::from(!explicit)..=3) {
        doc.operators.push((format!("T{i}"), Operator::random(&space, rng)));
    }
    doc
}
