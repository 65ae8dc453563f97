//! Text grammar for coefficient fields.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-'] integer | '^' '(' ['-'] integer ')')?
//! atom   := number | 'pi' | var | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | sqrt
//! var    := y1..y3 | x1..x3 | b1..b3
//! ```
//!
//! Decimal literals are read as exact rationals (`0.1` is `1/10`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expr::{ScalarExpr, Var};
use super::CalculusError;

pub fn parse_expr(src: &str) -> Result<ScalarExpr, CalculusError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> CalculusError {
        CalculusError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), CalculusError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, CalculusError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, CalculusError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr, CalculusError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarExpr, CalculusError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        let k = self.integer()?;
        if paren {
            self.expect(b')')?;
        }
        let k = i32::try_from(k).map_err(|_| self.error("exponent too large"))?;
        Ok(base.powi(if neg { -k } else { k }))
    }

    fn integer(&mut self) -> Result<i64, CalculusError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("bad integer"))
    }

    fn number(&mut self) -> Result<ScalarExpr, CalculusError> {
        let start = self.pos;
        let mut int_part = BigInt::zero();
        let mut den = BigInt::one();
        let mut seen_dot = false;
        let mut digits = 0;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_digit() {
                int_part = int_part * 10 + (c - b'0') as u32;
                if seen_dot {
                    den *= 10;
                }
                digits += 1;
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits == 0 {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        let mut value = BigRational::new(int_part, den);
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
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
            let e = self.integer()?;
            let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), e as usize));
            value = if neg { value / scale } else { value * scale };
        }
        Ok(ScalarExpr::rational(value))
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn atom(&mut self) -> Result<ScalarExpr, CalculusError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident().to_string();
                let func: Option<fn(&ScalarExpr) -> ScalarExpr> = match name.as_str() {
                    "sin" => Some(ScalarExpr::sin),
                    "cos" => Some(ScalarExpr::cos),
                    "exp" => Some(ScalarExpr::exp),
                    "sqrt" => Some(ScalarExpr::sqrt),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect(b'(')?;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    return Ok(f(&arg));
                }
                if name == "pi" {
                    return Ok(ScalarExpr::pi());
                }
                let var = match name.as_bytes() {
                    [k @ (b'y' | b'x' | b'b'), d @ b'1'..=b'3'] => {
                        let i = (d - b'1') as usize;
                        match k {
                            b'y' => Var::Y(i),
                            b'x' => Var::X(i),
                            _ => Var::B(i),
                        }
                    }
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown identifier '{name}'")));
                    }
                };
                Ok(ScalarExpr::var(var))
            }
            Some(c) => Err(self.error(&format!("unexpected '{}'", c as char))),
        }
    }
}
