//! Text forms of polynomials and rationals.
//!
//! A polynomial is either a coefficient list, low degree first (`[-1, 0, 1]`),
//! or an expression in `z` (`z^2 - 1`, `3/2*z^3 - (z+1)^2`).

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::PolyError;
use crate::exactpoly::{ExactPoly, Rational};

pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let s = s.trim();
    let err = PolyError::Parse { pos: 0, msg: "expected integer or p/q" };
    let (n, d) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err.clone())?;
    let d: BigInt = d.parse().map_err(|_| err.clone())?;
    if d.is_zero() {
        return Err(PolyError::Parse { pos: 0, msg: "zero denominator" });
    }
    Ok(Rational::new(n, d))
}

pub fn parse_poly(s: &str) -> Result<ExactPoly, PolyError> {
    let t = s.trim();
    if let Some(body) = t.strip_prefix('[') {
        let body = body.strip_suffix(']').ok_or(PolyError::Parse { pos: t.len(), msg: "missing ]" })?;
        if body.trim().is_empty() {
            return Ok(ExactPoly::zero());
        }
        let c: Result<Vec<_>, _> = body.split(',').map(parse_rational).collect();
        return Ok(ExactPoly::new(c?));
    }
    let mut p = Parser { s: t.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected character"));
    }
    Ok(e)
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> alloc::string::String {
    alloc::format!("{}", r)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &'static str) -> PolyError {
        PolyError::Parse { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ExactPoly, PolyError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ExactPoly, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(self.err("division only by nonzero constants"));
                    }
                    acc = acc.scale(&d.coeff(0).recip());
                }
                Some(c) if c == b'(' || c == b'z' || c == b'x' || c.is_ascii_digit() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<ExactPoly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ExactPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = core::str::from_utf8(&self.s[start..self.pos])
                .ok()
                .and_then(|t| t.parse().ok())
                .ok_or(self.err("expected exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExactPoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected )"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'z') | Some(b'x') => {
                self.pos += 1;
                Ok(ExactPoly::x())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: BigInt = core::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap();
                Ok(ExactPoly::constant(Rational::from_integer(n)))
            }
            _ => Err(self.err("expected number, z or (")),
        }
    }
}

/// `true` when the rational is strictly between 0 and `d`.
pub fn alpha_in_range(alpha: &Rational, d: usize) -> bool {
    alpha.is_positive() && *alpha < Rational::from_integer(BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{int, rat};

    #[test]
    fn list_and_expression_agree() {
        let a = parse_poly("[-1, 0, 1]").unwrap();
        let b = parse_poly("z^2 - 1").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("[1/2, -3/4]").unwrap(), ExactPoly::new(alloc::vec![rat(1, 2), rat(-3, 4)]));
        assert_eq!(parse_poly("3/2*z^3 - 2z + 1").unwrap(), ExactPoly::new(alloc::vec![int(1), int(-2), int(0), rat(3, 2)]));
        assert_eq!(parse_poly("(z+1)^3").unwrap(), ExactPoly::from_i64s(&[1, 3, 3, 1]));
        assert_eq!(parse_poly("-z(z - 1)").unwrap(), ExactPoly::from_i64s(&[0, 1, -1]));
        assert_eq!(parse_poly("[]").unwrap(), ExactPoly::zero());
    }

    #[test]
    fn errors() {
        assert!(parse_poly("z^").is_err());
        assert!(parse_poly("z / z").is_err());
        assert!(parse_poly("z + y").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
    }

    #[test]
    fn round_trip_display() {
        for s in ["z^3 - 2*z + 1", "(1/2)*z^2 - 3", "-z^4 + z"] {
            let p = parse_poly(s).unwrap();
            assert_eq!(parse_poly(&alloc::format!("{}", p)).unwrap(), p);
        }
    }
}
