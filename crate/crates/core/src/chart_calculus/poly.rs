//! Exact polynomial normal form with rational coefficients.
//!
//! Used for exact comparisons of polynomial coefficient fields and for the
//! one-variable antiderivatives behind action coordinates and symmetrization.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expr::{ScalarExpr, Var};

/// Exponent vector indexed as y1..y3, x1..x3, b1..b3.
type Monomial = [u8; 9];

fn slot(v: Var) -> usize {
    match v {
        Var::Y(i) => i,
        Var::X(i) => 3 + i,
        Var::B(i) => 6 + i,
    }
}

fn var_of(slot: usize) -> Var {
    match slot {
        0..=2 => Var::Y(slot),
        3..=5 => Var::X(slot - 3),
        _ => Var::B(slot - 6),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert([0; 9], c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        let mut m = [0; 9];
        m[slot(v)] = 1;
        let mut p = Poly::zero();
        p.terms.insert(m, BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&[0; 9]).cloned(),
            _ => None,
        }
    }

    fn accumulate(&mut self, m: Monomial, c: BigRational) {
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, -c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = *ma;
                for (e, f) in m.iter_mut().zip(mb) {
                    *e += f;
                }
                out.accumulate(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(BigRational::one()), |acc, _| acc.mul(self))
    }

    pub fn diff(&self, v: Var) -> Poly {
        let s = slot(v);
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m[s] == 0 {
                continue;
            }
            let mut m2 = *m;
            m2[s] -= 1;
            out.accumulate(m2, c * BigRational::from_integer(m[s].into()));
        }
        out
    }

    /// Replace `v` by the constant `value`.
    pub fn at(&self, v: Var, value: &BigRational) -> Poly {
        let s = slot(v);
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            m2[s] = 0;
            out.accumulate(m2, c * num_traits::pow::Pow::pow(value, m[s] as u32));
        }
        out
    }

    /// `∫_{lower}^{v} p ds`, with `v` kept symbolic.
    pub fn integral_from(&self, v: Var, lower: &BigRational) -> Poly {
        let s = slot(v);
        let mut prim = Poly::zero();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            m2[s] += 1;
            prim.accumulate(m2, c / BigRational::from_integer((m[s] + 1).into()));
        }
        prim.sub(&prim.at(v, lower))
    }

    pub fn to_expr(&self) -> ScalarExpr {
        let mut acc = ScalarExpr::zero();
        for (m, c) in &self.terms {
            let mut term = ScalarExpr::rational(c.clone());
            for (s, &e) in m.iter().enumerate() {
                if e > 0 {
                    term = term * ScalarExpr::var(var_of(s)).powi(e as i32);
                }
            }
            acc = acc + term;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normal_form_cancels() {
        let e = (ScalarExpr::y(0) + ScalarExpr::y(1)).powi(2)
            - ScalarExpr::y(0).powi(2)
            - ScalarExpr::int(2) * ScalarExpr::y(0) * ScalarExpr::y(1)
            - ScalarExpr::y(1).powi(2);
        assert!(e.to_poly().unwrap().is_zero());
    }

    #[test]
    fn definite_integral_in_one_variable() {
        // ∫_{1}^{y1} 3 s^2 y2 ds = (y1^3 - 1) y2
        let p = Poly::constant(q(3, 1)).mul(&Poly::var(Var::Y(0)).pow(2)).mul(&Poly::var(Var::Y(1)));
        let got = p.integral_from(Var::Y(0), &q(1, 1));
        let want = Poly::var(Var::Y(0)).pow(3).sub(&Poly::constant(q(1, 1))).mul(&Poly::var(Var::Y(1)));
        assert_eq!(got, want);
    }

    #[test]
    fn trig_is_not_polynomial() {
        assert!(ScalarExpr::y(0).sin().to_poly().is_none());
    }
}
