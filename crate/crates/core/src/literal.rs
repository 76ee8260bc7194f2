//! Numeric literals: integers, `p/q`, decimals (with optional exponent)
//! and quadratic surds such as `180-80*sqrt(5)` or `(20/61)*(9-2*sqrt(5))`.
//!
//! Values are kept exactly as `p + q*sqrt(r)` with rational `p, q, r`.
//! Mixing two different radicands is rejected.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{Mp, Real, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("empty literal")]
    Empty,
    #[error("unexpected {found:?} at offset {pos}")]
    Unexpected { pos: usize, found: String },
    #[error("cannot combine square roots of different radicands ({0} and {1})")]
    MixedRadicals(String, String),
    #[error("square root of a negative number")]
    NegativeRadicand,
    #[error("square root of an irrational value")]
    NestedRadical,
    #[error("division by zero")]
    DivisionByZero,
    #[error("only radix 10 is supported, got {0}")]
    Radix(u32),
}

/// Exact value `p + q*sqrt(r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub p: BigRational,
    pub q: BigRational,
    pub r: BigRational,
}

impl Surd {
    pub fn rational(p: BigRational) -> Self {
        Surd { p, q: BigRational::zero(), r: BigRational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Surd::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero() || self.r.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.p.clone())
    }

    pub fn to_mp(&self) -> Mp {
        let p = Mp::from_rational(&self.p);
        if self.is_rational() {
            return p;
        }
        p + Mp::from_rational(&self.q) * Mp::from_rational(&self.r).sqrt()
    }

    pub fn to_real<T: Real>(&self) -> T {
        T::from_mp(&self.to_mp())
    }

    pub fn to_f64(&self) -> f64 {
        self.to_mp().to_f64()
    }

    /// Square root of a rational value; exact when it is a perfect square.
    pub fn sqrt_of(x: &BigRational) -> Result<Surd, LiteralError> {
        if Signed::is_negative(x) {
            return Err(LiteralError::NegativeRadicand);
        }
        if let Some(s) = x.try_sqrt() {
            return Ok(Surd::rational(s));
        }
        Ok(Surd { p: BigRational::zero(), q: BigRational::one(), r: x.clone() })
    }

    fn radicand(&self, other: &Surd) -> Result<BigRational, LiteralError> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(BigRational::zero()),
            (false, true) => Ok(self.r.clone()),
            (true, false) => Ok(other.r.clone()),
            (false, false) if self.r == other.r => Ok(self.r.clone()),
            _ => Err(LiteralError::MixedRadicals(self.r.to_string(), other.r.to_string())),
        }
    }

    pub fn add(&self, o: &Surd) -> Result<Surd, LiteralError> {
        let r = self.radicand(o)?;
        Ok(Surd { p: &self.p + &o.p, q: &self.q + &o.q, r }.canonical())
    }

    pub fn neg(&self) -> Surd {
        Surd { p: -self.p.clone(), q: -self.q.clone(), r: self.r.clone() }
    }

    pub fn sub(&self, o: &Surd) -> Result<Surd, LiteralError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Surd) -> Result<Surd, LiteralError> {
        let r = self.radicand(o)?;
        let p = &self.p * &o.p + &self.q * &o.q * &r;
        let q = &self.p * &o.q + &self.q * &o.p;
        Ok(Surd { p, q, r }.canonical())
    }

    pub fn recip(&self) -> Result<Surd, LiteralError> {
        let norm = &self.p * &self.p - &self.q * &self.q * &self.r;
        if norm.is_zero() {
            return Err(LiteralError::DivisionByZero);
        }
        Ok(Surd { p: &self.p / &norm, q: -(&self.q / &norm), r: self.r.clone() }.canonical())
    }

    pub fn div(&self, o: &Surd) -> Result<Surd, LiteralError> {
        self.mul(&o.recip()?)
    }

    fn canonical(mut self) -> Surd {
        if self.q.is_zero() || self.r.is_zero() {
            self.q = BigRational::zero();
            self.r = BigRational::zero();
        }
        self
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.p);
        }
        let q_abs = Signed::abs(&self.q);
        let sign = if Signed::is_negative(&self.q) { "-" } else { "+" };
        let coef = if q_abs.is_one() { String::new() } else { format!("{}*", q_abs) };
        if self.p.is_zero() {
            let lead = if Signed::is_negative(&self.q) { "-" } else { "" };
            write!(f, "{lead}{coef}sqrt({})", self.r)
        } else {
            write!(f, "{}{sign}{coef}sqrt({})", self.p, self.r)
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn unexpected(&mut self) -> LiteralError {
        let found = match self.peek() {
            Some(c) => (c as char).to_string(),
            None => "end of input".to_string(),
        };
        LiteralError::Unexpected { pos: self.pos, found }
    }

    fn expect(&mut self, c: u8) -> Result<(), LiteralError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Surd, LiteralError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Surd, LiteralError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Surd, LiteralError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Surd, LiteralError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b's') => {
                if self.src[self.pos..].starts_with(b"sqrt") {
                    self.pos += 4;
                    self.expect(b'(')?;
                    let inner = self.expr()?;
                    self.expect(b')')?;
                    let x = inner.as_rational().ok_or(LiteralError::NestedRadical)?;
                    Surd::sqrt_of(&x)
                } else {
                    Err(self.unexpected())
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<Surd, LiteralError> {
        let start = self.pos;
        let int_part = self.digits();
        let mut frac = String::new();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if int_part.is_empty() && frac.is_empty() {
            self.pos = start;
            return Err(self.unexpected());
        }
        let mut exp: i64 = 0;
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            let neg = match self.src.get(self.pos) {
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
            let e = self.digits();
            if e.is_empty() {
                return Err(self.unexpected());
            }
            exp = e.parse::<i64>().map_err(|_| LiteralError::Unexpected { pos: self.pos, found: e })?;
            if neg {
                exp = -exp;
            }
        }
        let mantissa: BigInt = format!("{int_part}{frac}").parse().unwrap_or_default();
        let shift = exp - frac.len() as i64;
        let ten = BigInt::from(10);
        let value = if shift >= 0 {
            BigRational::from_integer(mantissa * num_traits::pow(ten, shift as usize))
        } else {
            BigRational::new(mantissa, num_traits::pow(ten, (-shift) as usize))
        };
        Ok(Surd::rational(value))
    }
}

/// Parse a single numeric literal.
pub fn parse_literal(s: &str) -> Result<Surd, LiteralError> {
    if s.trim().is_empty() {
        return Err(LiteralError::Empty);
    }
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected());
    }
    Ok(v)
}

/// Parse a comma-separated list; commas inside parentheses do not split.
pub fn parse_list(s: &str) -> Result<Vec<Surd>, LiteralError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(parse_literal(&s[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(parse_literal(&s[start..])?);
    Ok(out)
}
