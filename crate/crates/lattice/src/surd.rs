//! Exact arithmetic in a real quadratic field Q(sqrt d).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurdError {
    #[error("square root of a negative number")]
    Negative,
    #[error("square root of {0} lies outside the supported quadratic fields")]
    Unsupported(String),
}

/// a + b sqrt(d) with d squarefree; d = 1 means the value is rational and b = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl Surd {
    pub fn rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero(), d: BigInt::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Rational part, surd coefficient and radicand.
    pub fn parts(&self) -> (&BigRational, &BigRational, &BigInt) {
        (&self.a, &self.b, &self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    fn normalized(mut self) -> Self {
        if self.b.is_zero() {
            self.d = BigInt::one();
        } else if self.d.is_one() {
            self.a += &self.b;
            self.b = BigRational::zero();
        }
        self
    }

    fn field(&self, other: &Self) -> BigInt {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => other.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, other.d, "mixing quadratic fields Q(sqrt {}) and Q(sqrt {})", self.d, other.d);
                self.d.clone()
            }
        }
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            (x, _) => {
                // Opposite signs: compare a^2 with b^2 d.
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * BigRational::from_integer(self.d.clone());
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }

    pub fn recip(&self) -> Self {
        // 1 / (a + b sqrt d) = (a - b sqrt d) / (a^2 - b^2 d)
        let norm = &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone());
        assert!(!norm.is_zero(), "division by zero");
        Self { a: &self.a / &norm, b: -&self.b / &norm, d: self.d.clone() }.normalized()
    }

    /// Square root of a nonnegative rational, as an element of Q(sqrt f).
    pub fn sqrt_rational(q: &BigRational) -> Result<Self, SurdError> {
        if q.is_negative() {
            return Err(SurdError::Negative);
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        let (num, den) = (q.numer(), q.denom());
        // sqrt(n/m) = sqrt(n m) / m
        let (square, free) = squarefree_split(&(num * den)).ok_or_else(|| SurdError::Unsupported(q.to_string()))?;
        let coef = BigRational::new(square, den.clone());
        Ok(Self { a: BigRational::zero(), b: coef, d: free }.normalized())
    }
}

/// Writes n = s^2 f with f squarefree; None when n is too large to factor reliably.
fn squarefree_split(n: &BigInt) -> Option<(BigInt, BigInt)> {
    const TRIAL: u64 = 1_000_000;
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL && BigInt::from(p) * BigInt::from(p) <= rest {
        let bp = BigInt::from(p);
        let mut e = 0u32;
        while rest.is_multiple_of(&bp) {
            rest /= &bp;
            e += 1;
        }
        square *= bp.pow(e / 2);
        if e % 2 == 1 {
            free *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some((square, free));
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        return Some((square * root, free));
    }
    // No prime factor below TRIAL: below TRIAL^3 the cofactor has at most two prime
    // factors, and it is not a square, so it is squarefree.
    let limit = BigInt::from(TRIAL).pow(3);
    if rest < limit {
        return Some((square, free * rest));
    }
    None
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let d = self.field(rhs);
        Surd { a: &self.a + &rhs.a, b: &self.b + &rhs.b, d }.normalized()
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let d = self.field(rhs);
        Surd { a: &self.a - &rhs.a, b: &self.b - &rhs.b, d }.normalized()
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let d = self.field(rhs);
        let dr = BigRational::from_integer(d.clone());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dr;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Surd { a, b, d }.normalized()
    }
}

impl Div for &Surd {
    type Output = Surd;
    fn div(self, rhs: &Surd) -> Surd {
        self * &rhs.recip()
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl From<i64> for Surd {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for Surd {
    fn from(q: BigRational) -> Self {
        Self::rational(q)
    }
}
