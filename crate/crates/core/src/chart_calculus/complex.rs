use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::{Point, ScalarExpr, Var};
use super::parse::parse_expr;
use super::CalculusError;

/// Complex field stored as a pair of real expressions.
#[derive(Clone, Debug)]
pub struct CExpr {
    pub re: ScalarExpr,
    pub im: ScalarExpr,
}

/// Text form used in configuration files: `{"re": "...", "im": "..."}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexText {
    #[serde(default = "zero_text")]
    pub re: String,
    #[serde(default = "zero_text")]
    pub im: String,
}

fn zero_text() -> String {
    "0".to_string()
}

impl ComplexText {
    pub fn parse(&self) -> Result<CExpr, CalculusError> {
        Ok(CExpr::new(parse_expr(&self.re)?, parse_expr(&self.im)?))
    }
}

impl CExpr {
    pub fn new(re: ScalarExpr, im: ScalarExpr) -> Self {
        CExpr { re, im }
    }

    pub fn real(re: ScalarExpr) -> Self {
        CExpr { re, im: ScalarExpr::zero() }
    }

    pub fn imag(im: ScalarExpr) -> Self {
        CExpr { re: ScalarExpr::zero(), im }
    }

    pub fn zero() -> Self {
        Self::real(ScalarExpr::zero())
    }

    pub fn one() -> Self {
        Self::real(ScalarExpr::one())
    }

    pub fn i() -> Self {
        Self::imag(ScalarExpr::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn deps(&self) -> u16 {
        self.re.deps() | self.im.deps()
    }

    pub fn conj(&self) -> CExpr {
        CExpr::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, k: &ScalarExpr) -> CExpr {
        CExpr::new(&self.re * k, &self.im * k)
    }

    pub fn scale_i64(&self, k: i64) -> CExpr {
        CExpr::new(self.re.scale_i64(k), self.im.scale_i64(k))
    }

    /// Multiply by `i`.
    pub fn times_i(&self) -> CExpr {
        CExpr::new(-&self.im, self.re.clone())
    }

    pub fn diff(&self, v: Var) -> CExpr {
        CExpr::new(self.re.diff(v), self.im.diff(v))
    }

    pub fn eval(&self, p: &Point) -> Complex64 {
        let re = if self.re.is_zero() { 0.0 } else { self.re.eval(p) };
        let im = if self.im.is_zero() { 0.0 } else { self.im.eval(p) };
        Complex64::new(re, im)
    }

    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<ScalarExpr>) -> CExpr {
        CExpr::new(self.re.substitute(f), self.im.substitute(f))
    }

    pub fn is_fibre_periodic(&self) -> bool {
        self.re.is_fibre_periodic() && self.im.is_fibre_periodic()
    }
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i*({})", self.im),
            (false, false) => write!(f, "({}) + i*({})", self.re, self.im),
        }
    }
}

impl Add<&CExpr> for &CExpr {
    type Output = CExpr;
    fn add(self, o: &CExpr) -> CExpr {
        CExpr::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub<&CExpr> for &CExpr {
    type Output = CExpr;
    fn sub(self, o: &CExpr) -> CExpr {
        CExpr::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul<&CExpr> for &CExpr {
    type Output = CExpr;
    fn mul(self, o: &CExpr) -> CExpr {
        if self.im.is_zero() && o.im.is_zero() {
            return CExpr::real(&self.re * &o.re);
        }
        CExpr::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &CExpr {
    type Output = CExpr;
    fn neg(self) -> CExpr {
        CExpr::new(-&self.re, -&self.im)
    }
}

impl Add for CExpr {
    type Output = CExpr;
    fn add(self, o: CExpr) -> CExpr {
        &self + &o
    }
}

impl Sub for CExpr {
    type Output = CExpr;
    fn sub(self, o: CExpr) -> CExpr {
        &self - &o
    }
}

impl Mul for CExpr {
    type Output = CExpr;
    fn mul(self, o: CExpr) -> CExpr {
        &self * &o
    }
}

impl Neg for CExpr {
    type Output = CExpr;
    fn neg(self) -> CExpr {
        -&self
    }
}

impl From<ScalarExpr> for CExpr {
    fn from(re: ScalarExpr) -> Self {
        CExpr::real(re)
    }
}
