use std::fmt;
use std::str::FromStr;

use super::{Cnf, Coefficient};

/// Syntax error in ordinal text, with the byte offset of the first
/// offending character.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid ordinal at offset {pos}: {message}")]
pub struct ParseOrdinalError {
    pub pos: usize,
    pub message: String,
}

impl<C: Coefficient> fmt::Display for Cnf<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            f.write_str("w")?;
            if t.exp != Cnf::one() {
                if let Some(k) = t.exp.finite_value() {
                    write!(f, "^{k}")?;
                } else if t.exp == Cnf::omega() {
                    f.write_str("^w")?;
                } else {
                    write!(f, "^({})", t.exp)?;
                }
            }
            if !t.coeff.is_one() {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> FromStr for Cnf<C> {
    type Err = ParseOrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let value = p.ordinal()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseOrdinalError {
        ParseOrdinalError { pos: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ordinal<C: Coefficient>(&mut self) -> Result<Cnf<C>, ParseOrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn term<C: Coefficient>(&mut self) -> Result<Cnf<C>, ParseOrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') { self.factor()? } else { Cnf::one() };
                let coeff = if self.eat(b'*') { self.int()? } else { C::one() };
                Ok(Cnf::monomial(exp, coeff))
            }
            Some(c) if c.is_ascii_digit() => Ok(Cnf::finite(self.int()?)),
            _ => Err(self.error("expected 'w' or an integer")),
        }
    }

    fn factor<C: Coefficient>(&mut self) -> Result<Cnf<C>, ParseOrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                Ok(Cnf::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.ordinal()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(Cnf::finite(self.int()?)),
            _ => Err(self.error("expected 'w', an integer or '('")),
        }
    }

    fn int<C: Coefficient>(&mut self) -> Result<C, ParseOrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse::<C>().map_err(|_| ParseOrdinalError { pos: start, message: "integer out of range".into() })
    }
}
