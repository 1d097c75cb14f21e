//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr     := ("+" | "-")? term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := base ("^" nat)?
//! base     := rational | var | "(" expr ")"
//! rational := int ("/" nat)?
//! ```
//!
//! Whitespace is ignored between tokens. Variables must be one of the
//! declared names.

use num::{BigInt, Zero};

use crate::error::{ParseError, ParseErrorKind};
use crate::poly::{Poly, Rational};

pub fn parse_poly(src: &str, vars: &[String]) -> Result<Poly, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.unexpected());
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self) -> ParseError {
        match std::str::from_utf8(&self.src[self.pos..])
            .ok()
            .and_then(|s| s.chars().next())
        {
            Some(c) => ParseError {
                offset: self.pos,
                kind: ParseErrorKind::UnexpectedChar(c),
            },
            None => ParseError {
                offset: self.pos,
                kind: ParseErrorKind::UnexpectedEnd,
            },
        }
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let negate_first = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate_first {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let e = self.nat()?;
            let e: u32 = e.try_into().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::ExponentOverflow,
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.unexpected());
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.nat()?;
                let mut r = Rational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let start = self.pos;
                    let den = self.nat()?;
                    if den.is_zero() {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::ZeroDenominator,
                        });
                    }
                    r = Rational::new(r.numer().clone(), den);
                }
                Ok(Poly::constant(self.n(), r))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Poly::var(self.n(), i)),
                    None => Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::UnknownVariable(name.to_string()),
                    }),
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn nat(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected());
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit run parses"))
    }
}
