//! The `.pfc` definition format.
//!
//! ```text
//! # Pólya's triangle-filling curve
//! curve polya
//! start P
//! generator P basis square
//! seg 1/2 1/2 F
//! seg 1/2 -1/2 F
//! ```
//!
//! Directives: `curve <name>`, `start <id>`, `restrict <t0> <t1>`,
//! `generator <id> [basis square|triangular]`, and inside a generator
//! `seg <dx> <dy> [R] [F] [-> <id>]` or `jump <dx> <dy>`. `R` reverses the
//! segment, `F` mirrors it. Numbers are integers, decimals, rationals `a/b`,
//! the token `s3` (√3), or products of those joined by `*`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Basis, CurveDefinition, Generator, GeneratorItem};
use crate::geom::Vec2;

#[derive(Clone, Debug, Error, PartialEq)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("definition is empty")]
    Empty,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("`{0}` outside of a generator block")]
    OutsideGenerator(String),
    #[error("generator `{0}` defined twice")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` has zero net displacement")]
    ZeroNetDisplacement(String),
    #[error("generator `{0}` has no segments")]
    EmptyGenerator(String),
    #[error("zero-length segment")]
    ZeroSegment,
    #[error("restriction must satisfy 0 <= t0 < t1 <= 1")]
    BadRestriction,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &code[s..],
            column: code[..s].chars().count() + 1,
        });
    }
    out
}

fn parse_factor(s: &str) -> Option<f64> {
    if s == "s3" {
        return Some(3f64.sqrt());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_factor(num)?;
        let d: f64 = den.parse().ok()?;
        if d == 0.0 {
            return None;
        }
        return Some(n / d);
    }
    if !s.chars().all(|c| c.is_ascii_digit() || c == '.') || s.is_empty() {
        return None;
    }
    s.parse().ok()
}

/// Parse one number token (see module docs for the accepted forms).
pub(crate) fn parse_number(s: &str) -> Option<f64> {
    let (sign, body) = match s.as_bytes().first()? {
        b'-' => (-1.0, &s[1..]),
        b'+' => (1.0, &s[1..]),
        _ => (1.0, s),
    };
    let mut value = sign;
    for factor in body.split('*') {
        value *= parse_factor(factor)?;
    }
    value.is_finite().then_some(value)
}

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    line: usize,
    line_len: usize,
}

impl<'a> Cursor<'a> {
    fn err_at(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
        }
    }

    fn next(&mut self, what: &'static str) -> Result<&Token<'a>, ParseError> {
        if self.pos < self.tokens.len() {
            self.pos += 1;
            Ok(&self.tokens[self.pos - 1])
        } else {
            Err(self.err_at(self.line_len + 1, ParseErrorKind::Missing(what)))
        }
    }

    fn number(&mut self, what: &'static str) -> Result<f64, ParseError> {
        let tok = self.next(what)?;
        let (text, column) = (tok.text, tok.column);
        parse_number(text).ok_or_else(|| self.err_at(column, ParseErrorKind::BadNumber(text.into())))
    }

    fn ident(&mut self, what: &'static str) -> Result<String, ParseError> {
        Ok(self.next(what)?.text.to_string())
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(self.err_at(t.column, ParseErrorKind::UnexpectedToken(t.text.into()))),
            None => Ok(()),
        }
    }
}

struct PendingGenerator {
    generator: Generator,
    line: usize,
    /// (line, column) of each item, for error reporting after the fact.
    item_pos: Vec<(usize, usize)>,
}

/// Parse definition text into a [`CurveDefinition`].
pub fn parse_definition(text: &str) -> Result<CurveDefinition, ParseError> {
    let mut name: Option<String> = None;
    let mut start: Option<(String, usize, usize)> = None;
    let mut restriction = None;
    let mut pending: Vec<PendingGenerator> = Vec::new();
    let mut saw_anything = false;

    for (idx, raw) in text.lines().enumerate() {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        saw_anything = true;
        let mut cur = Cursor {
            tokens,
            pos: 0,
            line: idx + 1,
            line_len: raw.chars().count(),
        };
        let head = cur.next("directive")?;
        let (directive, head_col) = (head.text, head.column);
        match directive {
            "curve" => name = Some(cur.ident("curve name")?),
            "start" => {
                let col = cur.tokens.get(1).map_or(head_col, |t| t.column);
                start = Some((cur.ident("start generator")?, cur.line, col));
            }
            "restrict" => {
                let t0 = cur.number("restriction start")?;
                let t1 = cur.number("restriction end")?;
                if !(0.0..=1.0).contains(&t0) || !(0.0..=1.0).contains(&t1) || t0 >= t1 {
                    return Err(cur.err_at(head_col, ParseErrorKind::BadRestriction));
                }
                restriction = Some((t0, t1));
            }
            "generator" => {
                let id = cur.ident("generator id")?;
                let mut basis = Basis::Square;
                if cur.pos < cur.tokens.len() {
                    let tok = cur.next("basis")?;
                    if tok.text != "basis" {
                        let (t, c) = (tok.text.to_string(), tok.column);
                        return Err(cur.err_at(c, ParseErrorKind::UnexpectedToken(t)));
                    }
                    let tok = cur.next("basis kind")?;
                    basis = match tok.text {
                        "square" => Basis::Square,
                        "triangular" => Basis::Triangular,
                        other => {
                            let (t, c) = (other.to_string(), tok.column);
                            return Err(cur.err_at(c, ParseErrorKind::UnexpectedToken(t)));
                        }
                    };
                }
                if pending.iter().any(|p| p.generator.id == id) {
                    return Err(cur.err_at(head_col, ParseErrorKind::DuplicateGenerator(id)));
                }
                pending.push(PendingGenerator {
                    generator: Generator {
                        id,
                        basis,
                        items: Vec::new(),
                    },
                    line: cur.line,
                    item_pos: Vec::new(),
                });
            }
            "seg" | "jump" => {
                let Some(owner) = pending.last_mut().map(|p| p.generator.id.clone()) else {
                    return Err(cur.err_at(head_col, ParseErrorKind::OutsideGenerator(directive.into())));
                };
                let displacement = Vec2::new(cur.number("dx")?, cur.number("dy")?);
                let item = if directive == "jump" {
                    GeneratorItem::Jump { displacement }
                } else {
                    if displacement.norm() == 0.0 {
                        return Err(cur.err_at(head_col, ParseErrorKind::ZeroSegment));
                    }
                    let (mut reversed, mut mirrored, mut target) = (false, false, owner);
                    while cur.pos < cur.tokens.len() {
                        let tok = cur.next("flag")?;
                        match tok.text {
                            "R" if !reversed => reversed = true,
                            "F" if !mirrored => mirrored = true,
                            "->" => target = cur.ident("target generator")?,
                            other => {
                                let (t, c) = (other.to_string(), tok.column);
                                return Err(cur.err_at(c, ParseErrorKind::UnexpectedToken(t)));
                            }
                        }
                    }
                    GeneratorItem::Segment {
                        displacement,
                        reversed,
                        mirrored,
                        target,
                    }
                };
                let p = pending.last_mut().unwrap();
                p.generator.items.push(item);
                p.item_pos.push((cur.line, head_col));
            }
            other => {
                return Err(cur.err_at(head_col, ParseErrorKind::UnknownDirective(other.into())));
            }
        }
        cur.finish()?;
    }

    if !saw_anything || pending.is_empty() {
        let line = text.lines().count().max(1);
        return Err(ParseError {
            line,
            column: 1,
            kind: ParseErrorKind::Empty,
        });
    }

    let ids: Vec<String> = pending.iter().map(|p| p.generator.id.clone()).collect();
    for p in &pending {
        let g = &p.generator;
        if g.segment_count() == 0 {
            return Err(ParseError {
                line: p.line,
                column: 1,
                kind: ParseErrorKind::EmptyGenerator(g.id.clone()),
            });
        }
        for (it, &(line, column)) in g.items.iter().zip(&p.item_pos) {
            if let GeneratorItem::Segment { target, .. } = it {
                if !ids.contains(target) {
                    return Err(ParseError {
                        line,
                        column,
                        kind: ParseErrorKind::UnknownGenerator(target.clone()),
                    });
                }
            }
        }
        if g.net_displacement().norm() == 0.0 {
            return Err(ParseError {
                line: p.line,
                column: 1,
                kind: ParseErrorKind::ZeroNetDisplacement(g.id.clone()),
            });
        }
    }

    let start = match start {
        Some((id, line, column)) => {
            if !ids.contains(&id) {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::UnknownGenerator(id),
                });
            }
            id
        }
        None => ids[0].clone(),
    };

    let generators: BTreeMap<String, Generator> = pending
        .into_iter()
        .map(|p| (p.generator.id.clone(), p.generator))
        .collect();

    Ok(CurveDefinition {
        name: name.unwrap_or_else(|| "unnamed".to_string()),
        generators,
        start,
        restriction,
    })
}

/// Canonical text form; parsing it yields a structurally identical definition.
impl fmt::Display for CurveDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "curve {}", self.name)?;
        writeln!(f, "start {}", self.start)?;
        if let Some((t0, t1)) = self.restriction {
            writeln!(f, "restrict {t0} {t1}")?;
        }
        for g in self.generators.values() {
            writeln!(f, "generator {} basis {}", g.id, g.basis.keyword())?;
            for it in &g.items {
                match it {
                    GeneratorItem::Segment {
                        displacement: d,
                        reversed,
                        mirrored,
                        target,
                    } => {
                        write!(f, "seg {} {}", d.x, d.y)?;
                        if *reversed {
                            write!(f, " R")?;
                        }
                        if *mirrored {
                            write!(f, " F")?;
                        }
                        if *target != g.id {
                            write!(f, " -> {target}")?;
                        }
                        writeln!(f)?;
                    }
                    GeneratorItem::Jump { displacement: d } => writeln!(f, "jump {} {}", d.x, d.y)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const POLYA: &str = "# Pólya\ncurve polya\ngenerator P basis square\nseg 1/2 1/2 F\nseg 1/2 -1/2 F\n";

    #[test]
    fn parses_polya() {
        let def = parse_definition(POLYA).unwrap();
        assert_eq!(def.name, "polya");
        assert_eq!(def.start, "P");
        let g = &def.generators["P"];
        assert_eq!(g.items.len(), 2);
        assert_eq!(
            g.items[0],
            GeneratorItem::Segment {
                displacement: Vec2::new(0.5, 0.5),
                reversed: false,
                mirrored: true,
                target: "P".into()
            }
        );
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse_number("3"), Some(3.0));
        assert_eq!(parse_number("-0.25"), Some(-0.25));
        assert_eq!(parse_number("1/4"), Some(0.25));
        assert_eq!(parse_number("s3"), Some(3f64.sqrt()));
        assert_eq!(parse_number("-1/2*s3"), Some(-0.5 * 3f64.sqrt()));
        assert_eq!(parse_number("s3/2"), Some(3f64.sqrt() / 2.0));
        for bad in ["", "-", "1/0", "abc", "1e5", "1//2", "*"] {
            assert_eq!(parse_number(bad), None, "{bad}");
        }
    }

    #[test]
    fn empty_file_is_syntax_error() {
        for text in ["", "\n\n", "# only a comment\n"] {
            let err = parse_definition(text).unwrap_err();
            assert_eq!(err.kind, ParseErrorKind::Empty);
        }
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_definition("curve x\ngenerator A\nseg 1 zz\n").unwrap_err();
        assert_eq!((err.line, err.column), (3, 7));
        assert_eq!(err.kind, ParseErrorKind::BadNumber("zz".into()));

        let err = parse_definition("curve x\n  frobnicate\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn semantic_errors() {
        let cases = [
            ("generator A\nseg 1 0 -> B\n", ParseErrorKind::UnknownGenerator("B".into())),
            ("generator A\nseg 1 0\nseg -1 0\n", ParseErrorKind::ZeroNetDisplacement("A".into())),
            ("generator A\njump 1 0\n", ParseErrorKind::EmptyGenerator("A".into())),
            ("generator A\nseg 0 0\n", ParseErrorKind::ZeroSegment),
            ("seg 1 0\n", ParseErrorKind::OutsideGenerator("seg".into())),
            ("generator A\ngenerator A\n", ParseErrorKind::DuplicateGenerator("A".into())),
            ("restrict 0.5 0.5\ngenerator A\nseg 1 0\n", ParseErrorKind::BadRestriction),
            ("start Q\ngenerator A\nseg 1 0\n", ParseErrorKind::UnknownGenerator("Q".into())),
            ("generator A\nseg 1 0 R R\n", ParseErrorKind::UnexpectedToken("R".into())),
        ];
        for (text, kind) in cases {
            assert_eq!(parse_definition(text).unwrap_err().kind, kind, "{text}");
        }
    }

    #[test]
    fn jumps_are_preserved() {
        let def = super::super::builtin("zorder").unwrap();
        let jumps = def.generators["Z"]
            .items
            .iter()
            .filter(|i| matches!(i, GeneratorItem::Jump { .. }))
            .count();
        assert_eq!(jumps, 3);
    }

    #[test]
    fn multi_generator_targets() {
        let text = "curve two\nstart A\ngenerator A\nseg 1/2 0 -> B\nseg 1/2 0\n\
                    generator B basis triangular\nseg 1 0 R F -> A\nseg 0 1\nseg 1 -1\n";
        let def = parse_definition(text).unwrap();
        assert_eq!(def.generators.len(), 2);
        assert_eq!(def.generators["B"].basis, Basis::Triangular);
        match &def.generators["B"].items[0] {
            GeneratorItem::Segment {
                reversed,
                mirrored,
                target,
                ..
            } => assert!(*reversed && *mirrored && target == "A"),
            other => panic!("{other:?}"),
        }
    }
}
