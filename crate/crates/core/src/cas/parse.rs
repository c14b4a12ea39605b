//! Reader for polynomial expressions such as `x^2*y - 3/2*(z + 1)`.
//!
//! Division is only allowed by nonzero constants. The CLI has its own
//! expression grammar with positions and `inv(...)`; this one exists for
//! library users and tests.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};

impl Poly {
    pub fn parse(ring: &Arc<PolyRing>, text: &str) -> Result<Poly> {
        let mut p = Parser { ring, chars: text.chars().collect(), pos: 0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.error("unexpected character"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    ring: &'a Arc<PolyRing>,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Invalid(format!("{msg} at offset {} in polynomial expression", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.product()?.neg()
            }
            Some('+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    match d.constant_value() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&c.inv()),
                        _ => return Err(self.error("division by a non-constant or zero")),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            let e: u32 = digits.parse().map_err(|_| self.error("expected an exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                let n: BigInt = digits.parse().map_err(|_| self.error("bad integer"))?;
                let c = self
                    .ring
                    .field()
                    .from_rational(&BigRational::from_integer(n))
                    .ok_or_else(|| self.error("integer not representable"))?;
                Ok(Poly::constant(self.ring, c))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_alphanumeric() || *c == '_' || *c == '\'') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.ring.index_of(&name) {
                    Some(i) => Ok(Poly::var(self.ring, i)),
                    None => Err(Error::Invalid(format!("unknown variable `{name}` (ring has {:?})", self.ring.names()))),
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }
}
