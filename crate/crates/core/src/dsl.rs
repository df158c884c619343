//! Line-oriented text format for constructions.
//!
//! ```text
//! point A 0 0
//! point B 4 0
//! point C 2 2
//! midpoint D B C
//! intersect G line(A,D) line(B,E)
//! circumcircle k A B C
//! intersect2 P line(E,F) k near 1.2 3.4
//! regular_polygon A B 6 C D E F
//! hide G
//! discover D
//! ```
//!
//! Lines are `line(A,B)`, `parallel(A,B,P)`, `perp(A,B,P)`, `bisector(A,B)` or a name
//! bound with `line NAME ...`; circles are `circle(O,A)`, `circle3(A,B,C)` or a name bound
//! with `circle NAME O A` / `circumcircle NAME A B C`. Numbers are decimals or fractions
//! and are read exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::construction::{CircleRef, Construction, ConstructionError, LineRef, StepKind};
use crate::poly::{parse_rational, Rational};
use crate::statement::PointId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    SyntaxError,
    UnknownIdentifier,
    ArityError,
    InvalidStep,
    /// The step cannot be built at the given coordinates.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Directive {
    Discover(PointId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedFile {
    pub construction: Construction,
    pub directives: Vec<Directive>,
}

impl ParsedFile {
    /// Target of the last `discover` directive.
    pub fn target(&self) -> Option<PointId> {
        self.directives
            .iter()
            .rev()
            .map(|d| match d {
                Directive::Discover(p) => *p,
            })
            .next()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    column: usize,
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (_, ch) = chars[i];
        let column = i + 1;
        match ch {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' | ')' | ',' => {
                out.push(Token {
                    tok: match ch {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Comma,
                    },
                    column,
                });
                i += 1;
            }
            c if is_word_char(c) => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i].1) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|(_, c)| c).collect();
                out.push(Token {
                    tok: Tok::Word(word),
                    column,
                });
            }
            c => {
                return Err(DslError {
                    kind: DslErrorKind::SyntaxError,
                    line: lineno,
                    column,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '+' | '/' | '\'')
}

#[derive(Clone, Copy)]
enum Named {
    Line(LineRef),
    Circle(CircleRef),
}

enum Object {
    Line(LineRef),
    Circle(CircleRef),
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    line_len: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, kind: DslErrorKind, column: usize, message: impl Into<String>) -> DslError {
        DslError {
            kind,
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or(self.line_len + 1)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn word(&mut self, what: &str) -> Result<(String, usize), DslError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Word(w),
                column,
            }) => {
                self.pos += 1;
                Ok((w.clone(), *column))
            }
            Some(t) => Err(self.err(DslErrorKind::SyntaxError, t.column, format!("expected {what}"))),
            None => Err(self.err(DslErrorKind::ArityError, self.column(), format!("missing {what}"))),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), DslError> {
        match self.toks.get(self.pos) {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(DslErrorKind::SyntaxError, t.column, format!("expected {what}"))),
            None => Err(self.err(
                DslErrorKind::SyntaxError,
                self.column(),
                format!("expected {what}"),
            )),
        }
    }

    fn peek_is(&self, tok: &Tok) -> bool {
        self.toks.get(self.pos).is_some_and(|t| &t.tok == tok)
    }

    fn number(&mut self) -> Result<Rational, DslError> {
        let (w, col) = self.word("number")?;
        parse_rational(&w)
            .ok_or_else(|| self.err(DslErrorKind::SyntaxError, col, format!("invalid number `{w}`")))
    }

    fn finish(&self) -> Result<(), DslError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err(DslErrorKind::ArityError, self.column(), "too many arguments"))
        }
    }
}

struct Context {
    construction: Construction,
    named: HashMap<String, Named>,
    directives: Vec<Directive>,
}

impl Context {
    fn point(&self, p: &Parser<'_>, name: &str, column: usize) -> Result<PointId, DslError> {
        self.construction.find(name).ok_or_else(|| {
            p.err(
                DslErrorKind::UnknownIdentifier,
                column,
                format!("unknown point `{name}`"),
            )
        })
    }

    fn fresh(&self, p: &Parser<'_>, name: &str, column: usize) -> Result<String, DslError> {
        if self.construction.find(name).is_some() || self.named.contains_key(name) {
            return Err(p.err(
                DslErrorKind::InvalidStep,
                column,
                format!("`{name}` is already defined"),
            ));
        }
        if parse_rational(name).is_some() {
            return Err(p.err(
                DslErrorKind::SyntaxError,
                column,
                format!("`{name}` is not a valid name"),
            ));
        }
        Ok(name.to_string())
    }

    /// Parses a parenthesized point list after a function name.
    fn args(&self, p: &mut Parser<'_>, fname: &str, fcol: usize, n: usize) -> Result<Vec<PointId>, DslError> {
        p.expect(Tok::LParen, "`(`")?;
        let mut pts = Vec::new();
        loop {
            if p.peek_is(&Tok::RParen) {
                p.pos += 1;
                break;
            }
            if !pts.is_empty() {
                p.expect(Tok::Comma, "`,` or `)`")?;
            }
            let (w, col) = p.word("point name")?;
            pts.push(self.point(p, &w, col)?);
        }
        if pts.len() != n {
            return Err(p.err(
                DslErrorKind::ArityError,
                fcol,
                format!("{fname} takes {n} points, got {}", pts.len()),
            ));
        }
        Ok(pts)
    }

    fn object(&self, p: &mut Parser<'_>) -> Result<(Object, usize), DslError> {
        let (w, col) = p.word("line or circle")?;
        if p.peek_is(&Tok::LParen) {
            let obj = match w.as_str() {
                "line" => {
                    let a = self.args(p, &w, col, 2)?;
                    Object::Line(LineRef::Through(a[0], a[1]))
                }
                "parallel" => {
                    let a = self.args(p, &w, col, 3)?;
                    Object::Line(LineRef::Parallel {
                        a: a[0],
                        b: a[1],
                        through: a[2],
                    })
                }
                "perp" => {
                    let a = self.args(p, &w, col, 3)?;
                    Object::Line(LineRef::Perpendicular {
                        a: a[0],
                        b: a[1],
                        through: a[2],
                    })
                }
                "bisector" => {
                    let a = self.args(p, &w, col, 2)?;
                    Object::Line(LineRef::PerpendicularBisector(a[0], a[1]))
                }
                "circle" => {
                    let a = self.args(p, &w, col, 2)?;
                    Object::Circle(CircleRef::Center {
                        center: a[0],
                        through: a[1],
                    })
                }
                "circle3" => {
                    let a = self.args(p, &w, col, 3)?;
                    Object::Circle(CircleRef::Through3(a[0], a[1], a[2]))
                }
                _ => {
                    return Err(p.err(
                        DslErrorKind::UnknownIdentifier,
                        col,
                        format!("unknown object kind `{w}`"),
                    ))
                }
            };
            return Ok((obj, col));
        }
        match self.named.get(&w) {
            Some(Named::Line(l)) => Ok((Object::Line(*l), col)),
            Some(Named::Circle(c)) => Ok((Object::Circle(*c), col)),
            None => Err(p.err(
                DslErrorKind::UnknownIdentifier,
                col,
                format!("unknown line or circle `{w}`"),
            )),
        }
    }

    fn line(&self, p: &mut Parser<'_>) -> Result<LineRef, DslError> {
        match self.object(p)? {
            (Object::Line(l), _) => Ok(l),
            (Object::Circle(_), col) => {
                Err(p.err(DslErrorKind::SyntaxError, col, "expected a line, found a circle"))
            }
        }
    }

    fn hint(&self, p: &mut Parser<'_>) -> Result<(Rational, Rational), DslError> {
        let (w, col) = p.word("`near`")?;
        if w != "near" {
            return Err(p.err(DslErrorKind::SyntaxError, col, "expected `near`"));
        }
        Ok((p.number()?, p.number()?))
    }

    fn add(&mut self, p: &Parser<'_>, names: &[&str], column: usize, kind: StepKind) -> Result<(), DslError> {
        self.construction
            .apply_step(names, kind)
            .map(|_| ())
            .map_err(|e| {
                let kind = match e {
                    ConstructionError::UnknownReference(_) => DslErrorKind::UnknownIdentifier,
                    ConstructionError::OutputCount { .. } => DslErrorKind::ArityError,
                    ConstructionError::DegenerateStep { .. } => DslErrorKind::Degenerate,
                    _ => DslErrorKind::InvalidStep,
                };
                p.err(kind, column, e.to_string())
            })
    }

    fn statement(&mut self, p: &mut Parser<'_>) -> Result<(), DslError> {
        let (cmd, cmd_col) = p.word("command")?;
        match cmd.as_str() {
            "point" => {
                let (n, col) = p.word("point name")?;
                let n = self.fresh(p, &n, col)?;
                let x = p.number()?;
                let y = p.number()?;
                p.finish()?;
                self.add(p, &[&n], cmd_col, StepKind::FreePoint { x, y })
            }
            "midpoint" => {
                let (n, col) = p.word("point name")?;
                let n = self.fresh(p, &n, col)?;
                let (a, ca) = p.word("point")?;
                let (b, cb) = p.word("point")?;
                let a = self.point(p, &a, ca)?;
                let b = self.point(p, &b, cb)?;
                p.finish()?;
                self.add(p, &[&n], cmd_col, StepKind::Midpoint(a, b))
            }
            "intersect" => {
                let (n, col) = p.word("point name")?;
                let n = self.fresh(p, &n, col)?;
                let l1 = self.line(p)?;
                let l2 = self.line(p)?;
                p.finish()?;
                self.add(p, &[&n], cmd_col, StepKind::IntersectLines(l1, l2))
            }
            "intersect2" => {
                let (n, col) = p.word("point name")?;
                let n = self.fresh(p, &n, col)?;
                let (o1, _) = self.object(p)?;
                let (o2, c2) = self.object(p)?;
                let hint = self.hint(p)?;
                p.finish()?;
                let kind = match (o1, o2) {
                    (Object::Line(line), Object::Circle(circle))
                    | (Object::Circle(circle), Object::Line(line)) => {
                        StepKind::IntersectLineCircle { line, circle, hint }
                    }
                    (Object::Circle(first), Object::Circle(second)) => {
                        StepKind::IntersectCircles { first, second, hint }
                    }
                    (Object::Line(_), Object::Line(_)) => {
                        return Err(p.err(
                            DslErrorKind::SyntaxError,
                            c2,
                            "intersect2 needs a circle; use intersect for two lines",
                        ))
                    }
                };
                self.add(p, &[&n], cmd_col, kind)
            }
            "foot" => {
                let (n, col) = p.word("point name")?;
                let n = self.fresh(p, &n, col)?;
                let (a, ca) = p.word("point")?;
                let point = self.point(p, &a, ca)?;
                let line = self.line(p)?;
                p.finish()?;
                self.add(p, &[&n], cmd_col, StepKind::Foot { point, line })
            }
            "on" => {
                let (n, col) = p.word("point name")?;
                let n = self.fresh(p, &n, col)?;
                let (obj, _) = self.object(p)?;
                let hint = self.hint(p)?;
                p.finish()?;
                let kind = match obj {
                    Object::Line(line) => StepKind::PointOnLine { line, hint },
                    Object::Circle(circle) => StepKind::PointOnCircle { circle, hint },
                };
                self.add(p, &[&n], cmd_col, kind)
            }
            "circle" | "circumcircle" => {
                let (n, col) = p.word("circle name")?;
                let n = self.fresh(p, &n, col)?;
                let want = if cmd == "circle" { 2 } else { 3 };
                let mut pts = Vec::new();
                for _ in 0..want {
                    let (a, ca) = p.word("point")?;
                    pts.push(self.point(p, &a, ca)?);
                }
                p.finish()?;
                let c = if want == 2 {
                    CircleRef::Center {
                        center: pts[0],
                        through: pts[1],
                    }
                } else {
                    CircleRef::Through3(pts[0], pts[1], pts[2])
                };
                self.named.insert(n, Named::Circle(c));
                Ok(())
            }
            "line" => {
                let (n, col) = p.word("line name")?;
                let n = self.fresh(p, &n, col)?;
                let l = self.line(p)?;
                p.finish()?;
                self.named.insert(n, Named::Line(l));
                Ok(())
            }
            "regular_polygon" => {
                let (a, ca) = p.word("point")?;
                let (b, cb) = p.word("point")?;
                let a = self.point(p, &a, ca)?;
                let b = self.point(p, &b, cb)?;
                let (nw, ncol) = p.word("side count")?;
                let sides: u32 = nw.parse().map_err(|_| {
                    p.err(
                        DslErrorKind::SyntaxError,
                        ncol,
                        format!("invalid side count `{nw}`"),
                    )
                })?;
                if sides < 3 {
                    return Err(p.err(
                        DslErrorKind::InvalidStep,
                        ncol,
                        "regular polygons need at least 3 sides",
                    ));
                }
                let mut names = Vec::new();
                while !p.at_end() {
                    let (w, col) = p.word("vertex name")?;
                    names.push(self.fresh(p, &w, col)?);
                }
                if names.len() != sides as usize - 2 {
                    return Err(p.err(
                        DslErrorKind::ArityError,
                        cmd_col,
                        format!(
                            "a {sides}-gon needs {} new vertex names, got {}",
                            sides - 2,
                            names.len()
                        ),
                    ));
                }
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                self.add(p, &refs, cmd_col, StepKind::RegularPolygon { a, b, sides })
            }
            "hide" => {
                if p.at_end() {
                    return Err(p.err(DslErrorKind::ArityError, p.column(), "missing point name"));
                }
                while !p.at_end() {
                    let (w, col) = p.word("point name")?;
                    let id = self.point(p, &w, col)?;
                    self.construction.set_hidden(id, true);
                }
                Ok(())
            }
            "discover" => {
                let (w, col) = p.word("point name")?;
                let id = self.point(p, &w, col)?;
                p.finish()?;
                self.directives.push(Directive::Discover(id));
                Ok(())
            }
            _ => Err(p.err(
                DslErrorKind::SyntaxError,
                cmd_col,
                format!("unknown command `{cmd}`"),
            )),
        }
    }
}

pub fn parse_dsl(text: &str) -> Result<ParsedFile, DslError> {
    let mut ctx = Context {
        construction: Construction::new(),
        named: HashMap::new(),
        directives: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = tokenize(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser {
            toks: &toks,
            pos: 0,
            line: lineno,
            line_len: raw.chars().count(),
        };
        ctx.statement(&mut p)?;
    }
    Ok(ParsedFile {
        construction: ctx.construction,
        directives: ctx.directives,
    })
}

/// Writes a rational as a terminating decimal when possible, else as `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d.is_multiple_of(&two) {
        d /= &two;
        twos += 1;
    }
    while d.is_multiple_of(&five) {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = (r * Rational::from_integer(scale.clone())).to_integer();
    let neg = scaled < BigInt::zero();
    let abs = if neg { -scaled } else { scaled };
    let s = format!("{:0>width$}", abs.to_string(), width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
}

fn line_text(c: &Construction, l: &LineRef) -> String {
    let n = |p: PointId| c.name(p);
    match *l {
        LineRef::Through(a, b) => format!("line({},{})", n(a), n(b)),
        LineRef::Parallel { a, b, through } => format!("parallel({},{},{})", n(a), n(b), n(through)),
        LineRef::Perpendicular { a, b, through } => format!("perp({},{},{})", n(a), n(b), n(through)),
        LineRef::PerpendicularBisector(a, b) => format!("bisector({},{})", n(a), n(b)),
    }
}

fn circle_text(c: &Construction, k: &CircleRef) -> String {
    let n = |p: PointId| c.name(p);
    match *k {
        CircleRef::Center { center, through } => format!("circle({},{})", n(center), n(through)),
        CircleRef::Through3(a, b, d) => format!("circle3({},{},{})", n(a), n(b), n(d)),
    }
}

/// Serializes a construction and directives; parsing the result reproduces them.
pub fn to_dsl(c: &Construction, directives: &[Directive]) -> String {
    let mut out = String::new();
    let hint = |h: &(Rational, Rational)| format!("near {} {}", format_rational(&h.0), format_rational(&h.1));
    for step in c.steps() {
        let name = step.outputs.first().map(|p| c.name(*p)).unwrap_or_default();
        let _ = match &step.kind {
            StepKind::FreePoint { x, y } => {
                writeln!(out, "point {name} {} {}", format_rational(x), format_rational(y))
            }
            StepKind::Midpoint(a, b) => writeln!(out, "midpoint {name} {} {}", c.name(*a), c.name(*b)),
            StepKind::IntersectLines(l1, l2) => {
                writeln!(out, "intersect {name} {} {}", line_text(c, l1), line_text(c, l2))
            }
            StepKind::IntersectLineCircle {
                line,
                circle,
                hint: h,
            } => writeln!(
                out,
                "intersect2 {name} {} {} {}",
                line_text(c, line),
                circle_text(c, circle),
                hint(h)
            ),
            StepKind::IntersectCircles {
                first,
                second,
                hint: h,
            } => writeln!(
                out,
                "intersect2 {name} {} {} {}",
                circle_text(c, first),
                circle_text(c, second),
                hint(h)
            ),
            StepKind::Foot { point, line } => {
                writeln!(out, "foot {name} {} {}", c.name(*point), line_text(c, line))
            }
            StepKind::PointOnLine { line, hint: h } => {
                writeln!(out, "on {name} {} {}", line_text(c, line), hint(h))
            }
            StepKind::PointOnCircle { circle, hint: h } => {
                writeln!(out, "on {name} {} {}", circle_text(c, circle), hint(h))
            }
            StepKind::RegularPolygon { a, b, sides } => {
                let names: Vec<&str> = step.outputs.iter().map(|p| c.name(*p)).collect();
                writeln!(
                    out,
                    "regular_polygon {} {} {sides} {}",
                    c.name(*a),
                    c.name(*b),
                    names.join(" ")
                )
            }
        };
    }
    let hidden: Vec<&str> = c.hidden().iter().map(|p| c.name(*p)).collect();
    if !hidden.is_empty() {
        let _ = writeln!(out, "hide {}", hidden.join(" "));
    }
    for d in directives {
        match d {
            Directive::Discover(p) => {
                let _ = writeln!(out, "discover {}", c.name(*p));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIDLINE: &str =
        "point A 0 0\npoint B 4 0\npoint C 2 2\nmidpoint D B C\nmidpoint E A C\ndiscover D\n";

    #[test]
    fn midline_file() {
        let f = parse_dsl(MIDLINE).unwrap();
        assert_eq!(f.construction.len(), 5);
        assert_eq!(f.construction.steps().len(), 5);
        assert_eq!(f.target(), f.construction.find("D"));
    }

    #[test]
    fn empty_file() {
        let f = parse_dsl("").unwrap();
        assert!(f.construction.is_empty());
        assert!(f.directives.is_empty());
    }

    #[test]
    fn missing_argument_is_arity_error() {
        let e = parse_dsl("midpoint D B").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::ArityError);
        assert_eq!(e.line, 1);
    }

    #[test]
    fn unknown_point_has_position() {
        let e = parse_dsl("point A 0 0\nmidpoint D A Z\n").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::UnknownIdentifier);
        assert_eq!((e.line, e.column), (2, 14));
    }

    #[test]
    fn bad_character() {
        let e = parse_dsl("point A 0 0 ;").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::SyntaxError);
        assert_eq!(e.column, 13);
    }

    #[test]
    fn named_objects_and_comments() {
        let text = "# triangle\npoint A 0 0\npoint B 4 0\npoint C 1 3 # apex\n\
                    circumcircle k A B C\nline m parallel(A,B,C)\nintersect2 P m k near 4 3\n";
        let f = parse_dsl(text).unwrap();
        let p = f.construction.find("P").unwrap();
        let xy = f.construction.point(p).coords;
        assert!((xy.0 - 3.0).abs() < 1e-12 && (xy.1 - 3.0).abs() < 1e-12, "{xy:?}");
    }

    #[test]
    fn rational_formatting() {
        let r = |a: i64, b: i64| Rational::new(a.into(), b.into());
        assert_eq!(format_rational(&r(3, 1)), "3");
        assert_eq!(format_rational(&r(-1, 4)), "-0.25");
        assert_eq!(format_rational(&r(6, 5)), "1.2");
        assert_eq!(format_rational(&r(1, 3)), "1/3");
    }

    #[test]
    fn round_trip() {
        let text = "point A 0 0\npoint B 4 0\npoint C 1.5 3\nmidpoint D B C\n\
                    intersect G line(A,D) perp(A,B,C)\nfoot F C bisector(A,B)\n\
                    on X line(A,C) near 1/3 1\nregular_polygon A B 4 E H\nhide G\ndiscover D\n";
        let f = parse_dsl(text).unwrap();
        let again = parse_dsl(&to_dsl(&f.construction, &f.directives)).unwrap();
        assert_eq!(f, again);
    }
}
