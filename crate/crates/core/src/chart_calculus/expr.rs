//! Scalar expression trees over chart coordinates.
//!
//! Nodes are reference counted and immutable, so subtrees are shared freely
//! between derivatives, products and substitutions. Smart constructors fold
//! constants and drop additive zeros / multiplicative ones; nothing else is
//! simplified.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A coordinate symbol. Indices are zero based (`Y(0)` prints as `y1`).
///
/// `B` symbols are B-field family parameters; they never appear in chart
/// fields proper, only in Yukawa families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Y(usize),
    X(usize),
    B(usize),
}

impl Var {
    fn bit(self) -> u16 {
        match self {
            Var::Y(i) => 1 << i,
            Var::X(i) => 1 << (3 + i),
            Var::B(i) => 1 << (6 + i),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Y(i) => write!(f, "y{}", i + 1),
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::B(i) => write!(f, "b{}", i + 1),
        }
    }
}

pub(crate) const Y_MASK: u16 = 0b000_000_111;
pub(crate) const X_MASK: u16 = 0b000_111_000;
pub(crate) const B_MASK: u16 = 0b111_000_000;

/// Evaluation point: base coordinates, fibre coordinates and family parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub y: [f64; 3],
    pub x: [f64; 3],
    pub b: [f64; 3],
}

impl Point {
    pub fn new(y: &[f64], x: &[f64]) -> Self {
        let mut p = Point::default();
        p.y[..y.len()].copy_from_slice(y);
        p.x[..x.len()].copy_from_slice(x);
        p
    }

    fn get(&self, v: Var) -> f64 {
        match v {
            Var::Y(i) => self.y[i],
            Var::X(i) => self.x[i],
            Var::B(i) => self.b[i],
        }
    }
}

#[derive(Debug)]
enum Op {
    Rational(BigRational, f64),
    Float(f64),
    Pi,
    Var(Var),
    Add(ScalarExpr, ScalarExpr),
    Sub(ScalarExpr, ScalarExpr),
    Mul(ScalarExpr, ScalarExpr),
    Div(ScalarExpr, ScalarExpr),
    Neg(ScalarExpr),
    Pow(ScalarExpr, i32),
    Sqrt(ScalarExpr),
    Sin(ScalarExpr),
    Cos(ScalarExpr),
    Exp(ScalarExpr),
}

#[derive(Debug)]
struct Node {
    op: Op,
    deps: u16,
}

/// Immutable real-valued expression.
#[derive(Clone, Debug)]
pub struct ScalarExpr(Arc<Node>);

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl ScalarExpr {
    fn node(op: Op) -> Self {
        let deps = match &op {
            Op::Rational(..) | Op::Float(_) | Op::Pi => 0,
            Op::Var(v) => v.bit(),
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) | Op::Div(a, b) => a.deps() | b.deps(),
            Op::Neg(a) | Op::Pow(a, _) | Op::Sqrt(a) | Op::Sin(a) | Op::Cos(a) | Op::Exp(a) => a.deps(),
        };
        ScalarExpr(Arc::new(Node { op, deps }))
    }

    pub fn rational(r: BigRational) -> Self {
        let f = ratio_to_f64(&r);
        Self::node(Op::Rational(r, f))
    }

    pub fn int(k: i64) -> Self {
        Self::rational(BigRational::from_integer(k.into()))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// Float constant. Prefer [`ScalarExpr::rational`] when the value is exact.
    pub fn float(v: f64) -> Self {
        Self::node(Op::Float(v))
    }

    pub fn pi() -> Self {
        Self::node(Op::Pi)
    }

    pub fn var(v: Var) -> Self {
        Self::node(Op::Var(v))
    }

    pub fn y(i: usize) -> Self {
        Self::var(Var::Y(i))
    }

    pub fn x(i: usize) -> Self {
        Self::var(Var::X(i))
    }

    pub fn b(i: usize) -> Self {
        Self::var(Var::B(i))
    }

    /// `2π·k·x_i`, the admissible argument shape for fibre modes.
    pub fn mode(k: i64, i: usize) -> Self {
        Self::int(2 * k) * Self::pi() * Self::x(i)
    }

    /// Bitmask of symbols the expression depends on (structurally).
    pub fn deps(&self) -> u16 {
        self.0.deps
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.deps() & v.bit() != 0
    }

    pub fn depends_on_fibre(&self) -> bool {
        self.deps() & X_MASK != 0
    }

    pub fn depends_on_base(&self) -> bool {
        self.deps() & Y_MASK != 0
    }

    pub fn depends_on_params(&self) -> bool {
        self.deps() & B_MASK != 0
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0.op {
            Op::Rational(r, _) => Some(r),
            _ => None,
        }
    }

    /// Numeric value when the expression is a literal constant.
    pub fn as_constant(&self) -> Option<f64> {
        match &self.0.op {
            Op::Rational(_, f) | Op::Float(f) => Some(*f),
            _ => None,
        }
    }

    /// Structural zero (a literal 0 after folding).
    pub fn is_zero(&self) -> bool {
        match &self.0.op {
            Op::Rational(r, _) => r.is_zero(),
            Op::Float(f) => *f == 0.0,
            _ => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0.op {
            Op::Rational(r, _) => r.is_one(),
            Op::Float(f) => *f == 1.0,
            _ => false,
        }
    }

    fn is_minus_one(&self) -> bool {
        match &self.0.op {
            Op::Rational(r, _) => (-r).is_one(),
            Op::Float(f) => *f == -1.0,
            _ => false,
        }
    }

    fn fold2(
        a: &ScalarExpr,
        b: &ScalarExpr,
        exact: impl Fn(&BigRational, &BigRational) -> Option<BigRational>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Option<ScalarExpr> {
        match (&a.0.op, &b.0.op) {
            (Op::Rational(p, _), Op::Rational(q, _)) => exact(p, q).map(ScalarExpr::rational),
            (Op::Rational(_, p) | Op::Float(p), Op::Rational(_, q) | Op::Float(q)) => {
                Some(ScalarExpr::float(float(*p, *q)))
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if let Some(c) = Self::fold2(self, other, |p, q| Some(p + q), |p, q| p + q) {
            return c;
        }
        if let Op::Neg(inner) = &other.0.op {
            return self.sub(inner);
        }
        Self::node(Op::Add(self.clone(), other.clone()))
    }

    pub fn sub(&self, other: &ScalarExpr) -> ScalarExpr {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.neg();
        }
        if let Some(c) = Self::fold2(self, other, |p, q| Some(p - q), |p, q| p - q) {
            return c;
        }
        if let Op::Neg(inner) = &other.0.op {
            return self.add(inner);
        }
        Self::node(Op::Sub(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if self.is_minus_one() {
            return other.neg();
        }
        if other.is_minus_one() {
            return self.neg();
        }
        if let Some(c) = Self::fold2(self, other, |p, q| Some(p * q), |p, q| p * q) {
            return c;
        }
        match (&self.0.op, &other.0.op) {
            (Op::Neg(a), Op::Neg(b)) => a.mul(b),
            (Op::Neg(a), _) => a.mul(other).neg(),
            (_, Op::Neg(b)) => self.mul(b).neg(),
            _ => Self::node(Op::Mul(self.clone(), other.clone())),
        }
    }

    pub fn div(&self, other: &ScalarExpr) -> ScalarExpr {
        if other.is_one() {
            return self.clone();
        }
        if self.is_zero() && !other.is_zero() {
            return Self::zero();
        }
        let exact = |p: &BigRational, q: &BigRational| (!q.is_zero()).then(|| p / q);
        if let Some(c) = Self::fold2(self, other, exact, |p, q| p / q) {
            return c;
        }
        Self::node(Op::Div(self.clone(), other.clone()))
    }

    pub fn neg(&self) -> ScalarExpr {
        match &self.0.op {
            Op::Rational(r, _) => Self::rational(-r),
            Op::Float(f) => Self::float(-f),
            Op::Neg(a) => a.clone(),
            _ => Self::node(Op::Neg(self.clone())),
        }
    }

    pub fn powi(&self, k: i32) -> ScalarExpr {
        match k {
            0 => return Self::one(),
            1 => return self.clone(),
            _ => {}
        }
        match &self.0.op {
            Op::Rational(r, _) if !(r.is_zero() && k < 0) => Self::rational(num_traits::pow::Pow::pow(r, k)),
            Op::Float(f) => Self::float(f.powi(k)),
            _ => Self::node(Op::Pow(self.clone(), k)),
        }
    }

    pub fn sqrt(&self) -> ScalarExpr {
        if let Op::Rational(r, _) = &self.0.op {
            if let (Some(n), Some(d)) = (isqrt_exact(r.numer()), isqrt_exact(r.denom())) {
                return Self::rational(BigRational::new(n, d));
            }
        }
        if let Op::Float(f) = &self.0.op {
            return Self::float(f.sqrt());
        }
        Self::node(Op::Sqrt(self.clone()))
    }

    pub fn sin(&self) -> ScalarExpr {
        if self.is_zero() {
            return Self::zero();
        }
        Self::node(Op::Sin(self.clone()))
    }

    pub fn cos(&self) -> ScalarExpr {
        if self.is_zero() {
            return Self::one();
        }
        Self::node(Op::Cos(self.clone()))
    }

    pub fn exp(&self) -> ScalarExpr {
        if self.is_zero() {
            return Self::one();
        }
        Self::node(Op::Exp(self.clone()))
    }

    pub fn scale_i64(&self, k: i64) -> ScalarExpr {
        Self::int(k).mul(self)
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, v: Var) -> ScalarExpr {
        if !self.depends_on(v) {
            return Self::zero();
        }
        match &self.0.op {
            Op::Rational(..) | Op::Float(_) | Op::Pi => Self::zero(),
            Op::Var(w) => {
                if *w == v {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Op::Add(a, b) => a.diff(v).add(&b.diff(v)),
            Op::Sub(a, b) => a.diff(v).sub(&b.diff(v)),
            Op::Mul(a, b) => a.diff(v).mul(b).add(&a.mul(&b.diff(v))),
            Op::Div(a, b) => {
                let da = a.diff(v);
                let db = b.diff(v);
                da.div(b).sub(&a.mul(&db).div(&b.powi(2)))
            }
            Op::Neg(a) => a.diff(v).neg(),
            Op::Pow(a, k) => Self::int(*k as i64).mul(&a.powi(k - 1)).mul(&a.diff(v)),
            Op::Sqrt(a) => a.diff(v).div(&Self::int(2).mul(self)),
            Op::Sin(a) => a.cos().mul(&a.diff(v)),
            Op::Cos(a) => a.sin().mul(&a.diff(v)).neg(),
            Op::Exp(a) => self.mul(&a.diff(v)),
        }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        match &self.0.op {
            Op::Rational(_, f) | Op::Float(f) => *f,
            Op::Pi => std::f64::consts::PI,
            Op::Var(v) => p.get(*v),
            Op::Add(a, b) => a.eval(p) + b.eval(p),
            Op::Sub(a, b) => a.eval(p) - b.eval(p),
            Op::Mul(a, b) => a.eval(p) * b.eval(p),
            Op::Div(a, b) => a.eval(p) / b.eval(p),
            Op::Neg(a) => -a.eval(p),
            Op::Pow(a, k) => a.eval(p).powi(*k),
            Op::Sqrt(a) => a.eval(p).sqrt(),
            Op::Sin(a) => a.eval(p).sin(),
            Op::Cos(a) => a.eval(p).cos(),
            Op::Exp(a) => a.eval(p).exp(),
        }
    }

    /// Replace symbols by expressions; symbols mapped to `None` are kept.
    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<ScalarExpr>) -> ScalarExpr {
        if self.deps() == 0 {
            return self.clone();
        }
        match &self.0.op {
            Op::Rational(..) | Op::Float(_) | Op::Pi => self.clone(),
            Op::Var(v) => f(*v).unwrap_or_else(|| self.clone()),
            Op::Add(a, b) => a.substitute(f).add(&b.substitute(f)),
            Op::Sub(a, b) => a.substitute(f).sub(&b.substitute(f)),
            Op::Mul(a, b) => a.substitute(f).mul(&b.substitute(f)),
            Op::Div(a, b) => a.substitute(f).div(&b.substitute(f)),
            Op::Neg(a) => a.substitute(f).neg(),
            Op::Pow(a, k) => a.substitute(f).powi(*k),
            Op::Sqrt(a) => a.substitute(f).sqrt(),
            Op::Sin(a) => a.substitute(f).sin(),
            Op::Cos(a) => a.substitute(f).cos(),
            Op::Exp(a) => a.substitute(f).exp(),
        }
    }

    /// Checks the fibre-periodicity rule: every fibre symbol sits inside a
    /// `sin`/`cos` whose argument is `2π·Σ k_i x_i + phase(y)` with integer `k_i`.
    pub fn is_fibre_periodic(&self) -> bool {
        if !self.depends_on_fibre() {
            return true;
        }
        match &self.0.op {
            Op::Var(Var::X(_)) => false,
            Op::Rational(..) | Op::Float(_) | Op::Pi | Op::Var(_) => true,
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) | Op::Div(a, b) => {
                a.is_fibre_periodic() && b.is_fibre_periodic()
            }
            Op::Neg(a) | Op::Pow(a, _) | Op::Sqrt(a) | Op::Exp(a) => a.is_fibre_periodic(),
            Op::Sin(a) | Op::Cos(a) => admissible_phase(a),
        }
    }

    /// Polynomial normal form, when the expression is a polynomial with
    /// rational coefficients (division only by nonzero constants).
    pub fn to_poly(&self) -> Option<super::poly::Poly> {
        use super::poly::Poly;
        Some(match &self.0.op {
            Op::Rational(r, _) => Poly::constant(r.clone()),
            Op::Float(_) | Op::Pi | Op::Sqrt(_) | Op::Sin(_) | Op::Cos(_) | Op::Exp(_) => return None,
            Op::Var(v) => Poly::var(*v),
            Op::Add(a, b) => a.to_poly()?.add(&b.to_poly()?),
            Op::Sub(a, b) => a.to_poly()?.sub(&b.to_poly()?),
            Op::Mul(a, b) => a.to_poly()?.mul(&b.to_poly()?),
            Op::Div(a, b) => {
                let d = b.to_poly()?.as_constant()?;
                if d.is_zero() {
                    return None;
                }
                a.to_poly()?.scale(&d.recip())
            }
            Op::Neg(a) => a.to_poly()?.scale(&-BigRational::one()),
            Op::Pow(a, k) if *k >= 0 => a.to_poly()?.pow(*k as u32),
            Op::Pow(..) => return None,
        })
    }

    fn precedence(&self) -> u8 {
        match &self.0.op {
            Op::Add(..) | Op::Sub(..) => 1,
            Op::Mul(..) | Op::Div(..) => 2,
            Op::Neg(_) => 3,
            Op::Pow(..) => 4,
            Op::Rational(r, _) if !r.is_integer() || r.is_negative() => 2,
            Op::Float(f) if *f < 0.0 => 3,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn admissible_phase(arg: &ScalarExpr) -> bool {
    if arg.depends_on_params() {
        return false;
    }
    for i in 0..3 {
        let v = Var::X(i);
        if !arg.depends_on(v) {
            continue;
        }
        let slope = arg.diff(v);
        if slope.deps() != 0 {
            return false;
        }
        let k = slope.eval(&Point::default()) / (2.0 * std::f64::consts::PI);
        if !k.is_finite() || (k - k.round()).abs() > 1e-12 {
            return false;
        }
    }
    true
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.op {
            Op::Rational(r, _) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Op::Float(v) => write!(f, "{v}"),
            Op::Pi => write!(f, "pi"),
            Op::Var(v) => write!(f, "{v}"),
            Op::Add(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " + ")?;
                b.fmt_child(f, 2)
            }
            Op::Sub(a, b) => {
                a.fmt_child(f, 1)?;
                write!(f, " - ")?;
                b.fmt_child(f, 2)
            }
            Op::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "*")?;
                b.fmt_child(f, 3)
            }
            Op::Div(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, "/")?;
                b.fmt_child(f, 4)
            }
            Op::Neg(a) => {
                write!(f, "-")?;
                a.fmt_child(f, 3)
            }
            Op::Pow(a, k) => {
                a.fmt_child(f, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Op::Sqrt(a) => write!(f, "sqrt({a})"),
            Op::Sin(a) => write!(f, "sin({a})"),
            Op::Cos(a) => write!(f, "cos({a})"),
            Op::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                ScalarExpr::$m(&self, &rhs)
            }
        }
        impl $tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                ScalarExpr::$m(&self, rhs)
            }
        }
        impl $tr<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                ScalarExpr::$m(self, &rhs)
            }
        }
        impl $tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                ScalarExpr::$m(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(&self)
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(self)
    }
}

impl From<i64> for ScalarExpr {
    fn from(k: i64) -> Self {
        ScalarExpr::int(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_keeps_trees_small() {
        let e = ScalarExpr::y(0) * ScalarExpr::one() + ScalarExpr::zero();
        assert_eq!(e.to_string(), "y1");
        assert!((ScalarExpr::frac(1, 2) * ScalarExpr::int(4)).is_one() == false);
        assert_eq!((ScalarExpr::frac(1, 2) * ScalarExpr::int(4)).as_rational().unwrap(), &BigRational::from_integer(2.into()));
    }

    #[test]
    fn derivative_of_trig_mode() {
        let e = ScalarExpr::mode(1, 0).sin();
        let d = e.diff(Var::X(0));
        let p = Point::new(&[0.0], &[0.1]);
        let want = 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * 0.1).cos();
        assert!((d.eval(&p) - want).abs() < 1e-12);
    }

    #[test]
    fn periodicity_rule() {
        assert!(ScalarExpr::mode(2, 1).cos().is_fibre_periodic());
        let shifted = (ScalarExpr::mode(1, 0) + ScalarExpr::y(0).powi(2)).sin();
        assert!(shifted.is_fibre_periodic());
        assert!(!ScalarExpr::x(0).is_fibre_periodic());
        let half = (ScalarExpr::pi() * ScalarExpr::x(0)).sin();
        assert!(!half.is_fibre_periodic());
        let quad = (ScalarExpr::mode(1, 0) * ScalarExpr::x(0)).sin();
        assert!(!quad.is_fibre_periodic());
    }

    #[test]
    fn sqrt_folds_perfect_squares() {
        assert_eq!(ScalarExpr::frac(9, 4).sqrt().to_string(), "3/2");
        assert_eq!(ScalarExpr::int(2).sqrt().to_string(), "sqrt(2)");
    }
}
