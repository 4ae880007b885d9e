//! Group expression language.
//!
//! ```text
//! expr   := "1" | "Z" | "Dinf" | "C(" int ")" | "S(" int ")" | "A(" int ")"
//!         | "perm(" int ";" gens ")" | "power(" expr "," points ")"
//!         | "wreath(" expr "," expr ")" | "tower(" expr "," int ")"
//!         | "prod(" expr {"," expr} ")" | ident
//! gens   := cycles {"," cycles}      cycles := "(" int {int} ")" {"(" ...")"}
//! points := "N" | int
//! ```
//!
//! A bare identifier is a reference to a named extension fixture.

use std::fmt;

use serde::Serialize;

/// Deepest nesting accepted by the parser.
pub const MAX_NESTING: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Points {
    Naturals,
    Finite(u64),
}

/// One generator as a product of disjoint cycles.
pub type Cycles = Vec<Vec<u32>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GroupExpr {
    Trivial,
    Cyclic(u64),
    Symmetric(u64),
    Alternating(u64),
    Perm { degree: u32, generators: Vec<Cycles> },
    Int,
    Dinf,
    Product(Vec<GroupExpr>),
    Power(Box<GroupExpr>, Points),
    Wreath(Box<GroupExpr>, Box<GroupExpr>),
    Tower(Box<GroupExpr>, u64),
    ExtensionRef(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Syntax,
    Arity,
    Range,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize)]
#[error("{kind:?} error at offset {offset}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub kind: ErrorKind,
    pub offset: usize,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(", "))
    }
}

const EXPR_START: &[&str] = &["1", "Z", "Dinf", "C(", "S(", "A(", "perm(", "power(", "wreath(", "tower(", "prod(", "identifier"];

pub fn parse_expr(text: &str) -> Result<GroupExpr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, depth: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(p.pos, "trailing input", &["end of input"]));
    }
    Ok(e)
}

impl std::str::FromStr for GroupExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn syntax(&self, offset: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError { kind: ErrorKind::Syntax, offset, message: message.into(), expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn error(&self, kind: ErrorKind, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError { kind, offset, message: message.into(), expected: Vec::new() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.describe_here();
            Err(self.syntax(self.pos, format!("found {found}"), &[&(c as char).to_string()]))
        }
    }

    fn describe_here(&self) -> String {
        match self.src.get(self.pos) {
            None => "end of input".into(),
            Some(_) => {
                let rest = String::from_utf8_lossy(&self.src[self.pos..]);
                format!("'{}'", rest.chars().next().unwrap_or('?'))
            }
        }
    }

    fn ident(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        let first = *self.src.get(start)?;
        if !(first.is_ascii_alphabetic() || first == b'_') {
            return None;
        }
        let mut end = start;
        while end < self.src.len() && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_') {
            end += 1;
        }
        self.pos = end;
        Some((start, String::from_utf8_lossy(&self.src[start..end]).into_owned()))
    }

    /// Unsigned decimal integer; returns its offset too.
    fn int(&mut self, expected: &str) -> Result<(usize, u64), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while end < self.src.len() && self.src[end].is_ascii_digit() {
            end += 1;
        }
        if end == start {
            let found = self.describe_here();
            return Err(self.syntax(start, format!("found {found}"), &[expected]));
        }
        let digits = std::str::from_utf8(&self.src[start..end]).expect("ascii digits");
        let v = digits.parse::<u64>().map_err(|_| self.error(ErrorKind::Range, start, format!("{digits} does not fit in 64 bits")))?;
        self.pos = end;
        Ok((start, v))
    }

    fn positive(&mut self, what: &str) -> Result<u64, ParseError> {
        let (at, v) = self.int("integer")?;
        if v == 0 {
            return Err(self.error(ErrorKind::Arity, at, format!("{what} must be at least 1")));
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<GroupExpr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error(ErrorKind::Range, self.pos, format!("nesting deeper than {MAX_NESTING}")));
        }
        let out = self.expr_inner();
        self.depth -= 1;
        out
    }

    fn expr_inner(&mut self) -> Result<GroupExpr, ParseError> {
        match self.peek() {
            Some(b'1') => {
                let (at, v) = self.int("1")?;
                if v != 1 {
                    return Err(self.syntax(at, format!("integer {v} is not a group"), EXPR_START));
                }
                Ok(GroupExpr::Trivial)
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                Err(self.syntax(at, "integer is not a group", EXPR_START))
            }
            _ => {
                let Some((at, name)) = self.ident() else {
                    let found = self.describe_here();
                    return Err(self.syntax(self.pos, format!("found {found}"), EXPR_START));
                };
                let call = self.peek() == Some(b'(');
                match (name.as_str(), call) {
                    ("Z", false) => Ok(GroupExpr::Int),
                    ("Dinf", false) => Ok(GroupExpr::Dinf),
                    ("C" | "S" | "A", true) => {
                        self.expect(b'(')?;
                        let n = self.positive("order parameter")?;
                        self.expect(b')')?;
                        Ok(match name.as_str() {
                            "C" => GroupExpr::Cyclic(n),
                            "S" => GroupExpr::Symmetric(n),
                            _ => GroupExpr::Alternating(n),
                        })
                    }
                    ("perm", true) => self.perm(),
                    ("power", true) => {
                        self.expect(b'(')?;
                        let base = self.expr()?;
                        self.expect(b',')?;
                        let points = match self.peek() {
                            Some(b'N') => {
                                let (at, id) = self.ident().expect("letter");
                                if id != "N" {
                                    return Err(self.syntax(at, format!("unknown point set {id}"), &["N", "integer"]));
                                }
                                Points::Naturals
                            }
                            _ => {
                                let (_, v) = self.int("N or integer")?;
                                Points::Finite(v)
                            }
                        };
                        self.expect(b')')?;
                        Ok(GroupExpr::Power(Box::new(base), points))
                    }
                    ("wreath", true) => {
                        self.expect(b'(')?;
                        let k = self.expr()?;
                        self.expect(b',')?;
                        let g = self.expr()?;
                        self.expect(b')')?;
                        Ok(GroupExpr::Wreath(Box::new(k), Box::new(g)))
                    }
                    ("tower", true) => {
                        self.expect(b'(')?;
                        let g = self.expr()?;
                        self.expect(b',')?;
                        let n = self.positive("tower height")?;
                        self.expect(b')')?;
                        Ok(GroupExpr::Tower(Box::new(g), n))
                    }
                    ("prod", true) => {
                        self.expect(b'(')?;
                        let mut factors = vec![self.expr()?];
                        while self.peek() == Some(b',') {
                            self.pos += 1;
                            factors.push(self.expr()?);
                        }
                        self.expect(b')')?;
                        Ok(GroupExpr::Product(factors))
                    }
                    ("Z" | "Dinf", true) => Err(self.syntax(self.pos, format!("{name} takes no arguments"), &[",", ")", "end of input"])),
                    ("C" | "S" | "A" | "perm" | "power" | "wreath" | "tower" | "prod", false) => {
                        let found = self.describe_here();
                        Err(self.syntax(self.pos, format!("found {found}"), &["("]))
                    }
                    (_, true) => Err(self.syntax(at, format!("unknown constructor {name}"), EXPR_START)),
                    (_, false) => Ok(GroupExpr::ExtensionRef(name)),
                }
            }
        }
    }

    fn perm(&mut self) -> Result<GroupExpr, ParseError> {
        self.expect(b'(')?;
        let (deg_at, degree) = self.int("degree")?;
        let degree = u32::try_from(degree).map_err(|_| self.error(ErrorKind::Range, deg_at, "degree does not fit in 32 bits"))?;
        self.expect(b';')?;
        let mut generators = vec![self.generator(degree)?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            generators.push(self.generator(degree)?);
        }
        self.expect(b')')?;
        Ok(GroupExpr::Perm { degree, generators })
    }

    fn generator(&mut self, degree: u32) -> Result<Cycles, ParseError> {
        let mut cycles: Cycles = Vec::new();
        let mut used = std::collections::BTreeSet::new();
        self.expect(b'(')?;
        loop {
            let mut cycle = Vec::new();
            while self.peek() != Some(b')') {
                let (at, v) = self.int("point or )")?;
                if v >= u64::from(degree) {
                    return Err(self.error(ErrorKind::Range, at, format!("point {v} is not below degree {degree}")));
                }
                if !used.insert(v) {
                    return Err(self.error(ErrorKind::Range, at, format!("point {v} repeated in one generator")));
                }
                cycle.push(v as u32);
            }
            let close = self.pos;
            self.pos += 1;
            if cycle.len() < 2 {
                return Err(self.error(ErrorKind::Arity, close, "a cycle needs at least two points"));
            }
            cycles.push(cycle);
            if self.peek() != Some(b'(') {
                return Ok(cycles);
            }
            self.pos += 1;
        }
    }
}

pub fn print_expr(e: &GroupExpr) -> String {
    e.to_string()
}

impl fmt::Display for Points {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Points::Naturals => f.write_str("N"),
            Points::Finite(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupExpr::Trivial => f.write_str("1"),
            GroupExpr::Cyclic(n) => write!(f, "C({n})"),
            GroupExpr::Symmetric(n) => write!(f, "S({n})"),
            GroupExpr::Alternating(n) => write!(f, "A({n})"),
            GroupExpr::Perm { degree, generators } => {
                write!(f, "perm({degree}; ")?;
                for (i, g) in generators.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    for c in g {
                        let pts: Vec<String> = c.iter().map(u32::to_string).collect();
                        write!(f, "({})", pts.join(" "))?;
                    }
                }
                f.write_str(")")
            }
            GroupExpr::Int => f.write_str("Z"),
            GroupExpr::Dinf => f.write_str("Dinf"),
            GroupExpr::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(ToString::to_string).collect();
                write!(f, "prod({})", parts.join(", "))
            }
            GroupExpr::Power(b, p) => write!(f, "power({b}, {p})"),
            GroupExpr::Wreath(k, g) => write!(f, "wreath({k}, {g})"),
            GroupExpr::Tower(g, n) => write!(f, "tower({g}, {n})"),
            GroupExpr::ExtensionRef(name) => f.write_str(name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_cases() {
        assert_eq!(parse_expr("wreath(C(2), Z)").unwrap(), GroupExpr::Wreath(Box::new(GroupExpr::Cyclic(2)), Box::new(GroupExpr::Int)));
        assert_eq!(parse_expr("tower(Dinf, 3)").unwrap(), GroupExpr::Tower(Box::new(GroupExpr::Dinf), 3));
        assert_eq!(parse_expr(" 1 ").unwrap(), GroupExpr::Trivial);
        assert_eq!(parse_expr("higman").unwrap(), GroupExpr::ExtensionRef("higman".into()));
        assert_eq!(parse_expr("power(C(2),N)").unwrap(), GroupExpr::Power(Box::new(GroupExpr::Cyclic(2)), Points::Naturals));
    }

    #[test]
    fn zero_height_tower_is_an_arity_error() {
        let err = parse_expr("tower(Dinf, 0)").unwrap_err();
        assert_eq!(err.kind, ErrorKind::Arity);
        assert_eq!(err.offset, 12);
    }

    #[test]
    fn canonical_printing() {
        let e = parse_expr("perm( 3 ;(0 1),(0 1 2) )").unwrap();
        assert_eq!(print_expr(&e), "perm(3; (0 1), (0 1 2))");
        let t = parse_expr("tower(wreath(C(2),Dinf),2)").unwrap();
        assert_eq!(print_expr(&t), "tower(wreath(C(2), Dinf), 2)");
        let pp = parse_expr("perm(4; (0 1)(2 3))").unwrap();
        assert_eq!(print_expr(&pp), "perm(4; (0 1)(2 3))");
    }

    #[test]
    fn errors_carry_offsets_and_expectations() {
        let e = parse_expr("wreath(C(2) Z)").unwrap_err();
        assert_eq!(e.offset, 12);
        assert_eq!(e.expected, [","]);
        let e = parse_expr("C(99999999999999999999)").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Range);
        let e = parse_expr("perm(2; (0 2))").unwrap_err();
        assert_eq!((e.kind, e.offset), (ErrorKind::Range, 11));
        let e = parse_expr("prod()").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(e.expected.contains(&"Z".to_string()));
        assert!(parse_expr("Z Z").is_err());
        assert!(parse_expr("").is_err());
        assert_eq!(parse_expr("foo(1)").unwrap_err().offset, 0);
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let text = "prod(".repeat(500);
        assert_eq!(parse_expr(&text).unwrap_err().kind, ErrorKind::Range);
    }
}
