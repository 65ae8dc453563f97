//! The bigraded algebra `Ω_U^{p,q} = Γ(∧^q Ω_y ⊗ ∧^{-p} T_x)`.
//!
//! A term is keyed by `(J, I)` bitmasks and stands for `dy_J ⊗ ∂/∂x_I`, with
//! `p = -|I|`, `q = |J|` and total degree `p + q`.

use std::collections::BTreeMap;
use std::fmt;

use super::chart::{sup_abs, Chart, SampleGrid};
use super::complex::CExpr;
use super::expr::{ScalarExpr, Var};
use super::form::{full_mask, mask_of, merge_sign, Form};
use super::CalculusError;

pub type Bidegree = (i32, i32);

fn bidegree_of(j: u8, i: u8) -> Bidegree {
    (-(i.count_ones() as i32), j.count_ones() as i32)
}

fn parity(k: u32) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(-1)^{pp' + qq'}`, the commutation sign of the bigraded product.
pub fn koszul(a: Bidegree, b: Bidegree) -> i64 {
    parity((a.0 * b.0 + a.1 * b.1).unsigned_abs())
}

/// Sign of `ι(∂/∂x_I) Ω_0 = (-1)^M dx_{I*}`.
fn contraction_sign(n: usize, i: u8) -> i64 {
    let star = full_mask(n) & !i;
    // M = #{(a, b) : a ∈ I, b ∈ I*, a > b}
    merge_sign(i, star)
}

#[derive(Clone, Debug)]
pub struct BigradedElement {
    n: usize,
    terms: BTreeMap<(u8, u8), CExpr>,
}

/// The built-in graded differentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GradedOperator {
    Dx,
    Dy,
    DxPrime,
}

impl GradedOperator {
    pub fn shift(self) -> Bidegree {
        match self {
            GradedOperator::Dx | GradedOperator::DxPrime => (1, 0),
            GradedOperator::Dy => (0, 1),
        }
    }

    pub fn apply(self, e: &BigradedElement) -> BigradedElement {
        match self {
            GradedOperator::Dx => e.d_x(),
            GradedOperator::Dy => e.d_y(),
            GradedOperator::DxPrime => e.d_x_prime(),
        }
    }

    /// `Φ^r_D(args)` for `r ∈ {2, 3}`.
    pub fn order_defect(self, args: &[BigradedElement]) -> Result<BigradedElement, CalculusError> {
        match args.len() {
            2 => Ok(self.phi2(&args[0], &args[1])),
            3 => Ok(self.phi3(&args[0], &args[1], &args[2])),
            r => Err(CalculusError::UnsupportedOrder(r)),
        }
    }

    pub fn phi2(self, a: &BigradedElement, b: &BigradedElement) -> BigradedElement {
        let n = a.n;
        let d1 = self.apply(&BigradedElement::one(n));
        let mut out = BigradedElement::zero(n);
        for (da, pa) in a.homogeneous_parts() {
            for (db, pb) in b.homogeneous_parts() {
                let s = koszul(da, db);
                let ab = pa.product(&pb);
                let piece = self
                    .apply(&ab)
                    .sub(&self.apply(&pa).product(&pb))
                    .sub(&self.apply(&pb).product(&pa).scale_i64(s))
                    .add(&d1.product(&ab));
                out = out.add(&piece);
            }
        }
        out
    }

    pub fn phi3(self, a: &BigradedElement, b: &BigradedElement, c: &BigradedElement) -> BigradedElement {
        let mut out = BigradedElement::zero(a.n);
        for (db, pb) in b.homogeneous_parts() {
            for (dc, pc) in c.homogeneous_parts() {
                let s = koszul(db, dc);
                let piece = self
                    .phi2(a, &pb.product(&pc))
                    .sub(&self.phi2(a, &pb).product(&pc))
                    .sub(&self.phi2(a, &pc).product(&pb).scale_i64(s));
                out = out.add(&piece);
            }
        }
        out
    }
}

impl BigradedElement {
    pub fn zero(n: usize) -> Self {
        BigradedElement { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: CExpr) -> Self {
        let mut e = Self::zero(n);
        e.accumulate(0, 0, c);
        e
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, CExpr::one())
    }

    /// `c · dy_{ys} ⊗ ∂/∂x_{xs}`, indices zero-based and in any order.
    pub fn term(n: usize, ys: &[usize], xs: &[usize], c: CExpr) -> Self {
        let mut e = Self::zero(n);
        e.insert(ys, xs, c);
        e
    }

    /// Adds `c · dy_{ys} ⊗ ∂/∂x_{xs}`, normalizing the index order by its permutation sign.
    pub fn insert(&mut self, ys: &[usize], xs: &[usize], c: CExpr) {
        if let (Some((j, s1)), Some((i, s2))) = (mask_of(ys), mask_of(xs)) {
            self.accumulate(j, i, c.scale_i64(s1 * s2));
        }
    }

    /// `Σ β_ij dy_j ⊗ ∂/∂x_i` from a matrix.
    pub fn from_matrix(beta: &[Vec<CExpr>]) -> Self {
        let n = beta.len();
        let mut e = Self::zero(n);
        for (i, row) in beta.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                e.accumulate(1 << j, 1 << i, c.clone());
            }
        }
        e
    }

    /// Inverse of [`from_matrix`](Self::from_matrix) on the `(-1,1)` part.
    pub fn to_matrix(&self) -> Vec<Vec<CExpr>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.coefficient(1 << j, 1 << i)).collect())
            .collect()
    }

    pub(crate) fn accumulate(&mut self, j: u8, i: u8, c: CExpr) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.remove(&(j, i)) {
            Some(old) => &old + &c,
            None => c,
        };
        if !next.is_zero() {
            self.terms.insert((j, i), next);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u8, u8), &CExpr)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, ymask: u8, xmask: u8) -> CExpr {
        self.terms.get(&(ymask, xmask)).cloned().unwrap_or_else(CExpr::zero)
    }

    /// `Some((p, q))` when every term has the same bidegree (zero is `(0, 0)`).
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut degs = self.terms.keys().map(|&(j, i)| bidegree_of(j, i));
        match degs.next() {
            None => Some((0, 0)),
            Some(d) => degs.all(|e| e == d).then_some(d),
        }
    }

    pub fn homogeneous_parts(&self) -> Vec<(Bidegree, BigradedElement)> {
        let mut parts: BTreeMap<Bidegree, BigradedElement> = BTreeMap::new();
        for (&(j, i), c) in &self.terms {
            parts
                .entry(bidegree_of(j, i))
                .or_insert_with(|| BigradedElement::zero(self.n))
                .accumulate(j, i, c.clone());
        }
        parts.into_iter().collect()
    }

    pub fn part(&self, deg: Bidegree) -> BigradedElement {
        let mut out = Self::zero(self.n);
        for (&(j, i), c) in &self.terms {
            if bidegree_of(j, i) == deg {
                out.accumulate(j, i, c.clone());
            }
        }
        out
    }

    fn map(&self, f: impl Fn(&CExpr) -> CExpr) -> Self {
        let mut out = Self::zero(self.n);
        for (&(j, i), c) in &self.terms {
            out.accumulate(j, i, f(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(j, i), c) in &other.terms {
            out.accumulate(j, i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(j, i), c) in &other.terms {
            out.accumulate(j, i, -c);
        }
        out
    }

    pub fn scale(&self, c: &CExpr) -> Self {
        self.map(|a| a * c)
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.map(|a| a.scale_i64(k))
    }

    pub fn scale_rational(&self, num: i64, den: i64) -> Self {
        let k = CExpr::real(ScalarExpr::frac(num, den));
        self.scale(&k)
    }

    pub fn re(&self) -> Self {
        self.map(|c| CExpr::real(c.re.clone()))
    }

    pub fn im(&self) -> Self {
        self.map(|c| CExpr::real(c.im.clone()))
    }

    pub fn try_product(&self, other: &Self) -> Result<Self, CalculusError> {
        if self.n != other.n {
            return Err(CalculusError::DimensionMismatch(self.n, other.n));
        }
        Ok(self.product(other))
    }

    /// `(dy_J ⊗ ∂_I)·(dy_J' ⊗ ∂_I') = (dy_J ∧ dy_J') ⊗ (∂_I ∧ ∂_I')`.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (&(j1, i1), a) in &self.terms {
            for (&(j2, i2), b) in &other.terms {
                let s = merge_sign(j1, j2) * merge_sign(i1, i2);
                if s != 0 {
                    out.accumulate(j1 | j2, i1 | i2, (a * b).scale_i64(s));
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.n), |acc, _| acc.product(self))
    }

    /// Image under `θ ⊗ v ↦ θ ∧ ι(v) Ω_0`.
    pub fn to_form(&self) -> Form {
        let full = full_mask(self.n);
        let mut f = Form::zero(self.n);
        for (&(j, i), c) in &self.terms {
            f.accumulate(j, full & !i, c.scale_i64(contraction_sign(self.n, i)));
        }
        f
    }

    pub fn from_form(form: &Form) -> Self {
        let n = form.n();
        let full = full_mask(n);
        let mut e = Self::zero(n);
        for (&(j, k), c) in form.terms() {
            let i = full & !k;
            e.accumulate(j, i, c.scale_i64(contraction_sign(n, i)));
        }
        e
    }

    /// Fibre part of the exterior derivative, raising `p` by one.
    pub fn d_x(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (&(j, i), c) in &self.terms {
            let sj = parity(j.count_ones());
            for k in (0..self.n).filter(|k| i & (1 << k) != 0) {
                let dc = c.diff(Var::X(k));
                if dc.is_zero() {
                    continue;
                }
                let above = (i >> (k + 1)).count_ones();
                out.accumulate(j, i & !(1 << k), dc.scale_i64(sj * parity(above)));
            }
        }
        out
    }

    /// Base part of the exterior derivative, raising `q` by one.
    pub fn d_y(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (&(j, i), c) in &self.terms {
            for k in (0..self.n).filter(|k| j & (1 << k) == 0) {
                let dc = c.diff(Var::Y(k));
                if dc.is_zero() {
                    continue;
                }
                let below = (j & ((1u8 << k) - 1)).count_ones();
                out.accumulate(j | (1 << k), i, dc.scale_i64(parity(below)));
            }
        }
        out
    }

    /// `(-1)^{p+q+1} d_x` on `Ω^{p,q}`.
    pub fn d_x_prime(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (&(j, i), c) in &self.d_x().terms {
            // the source term had |I| + 1 fibre indices
            let s = parity(i.count_ones() + 1 + j.count_ones() + 1);
            out.accumulate(j, i, c.scale_i64(s));
        }
        out
    }

    pub fn d(&self) -> Self {
        self.d_x().add(&self.d_y())
    }

    /// `[a, b] = Φ²_{d_x'}(a, b)`.
    pub fn bracket(&self, other: &Self) -> Self {
        GradedOperator::DxPrime.phi2(self, other)
    }

    /// `Σ_{p ≤ n} β^p / p!` for `β` of bidegree `(-1, 1)`.
    pub fn exp_beta(&self) -> Result<Self, CalculusError> {
        if !self.is_zero() && self.bidegree() != Some((-1, 1)) {
            return Err(CalculusError::WrongBidegree { expected: (-1, 1), found: self.bidegree() });
        }
        let mut acc = Self::one(self.n);
        let mut power = Self::one(self.n);
        let mut factorial = 1i64;
        for p in 1..=self.n as i64 {
            power = power.product(self);
            factorial *= p;
            acc = acc.add(&power.scale_rational(1, factorial));
        }
        Ok(acc)
    }

    pub fn substitute(&self, f: &dyn Fn(Var) -> Option<ScalarExpr>) -> Self {
        self.map(|c| c.substitute(f))
    }

    pub fn sup_norm(&self, chart: &Chart, grid: &SampleGrid) -> f64 {
        self.terms.values().map(|c| sup_abs(c, chart, grid)).fold(0.0, f64::max)
    }
}

fn fmt_mask(f: &mut fmt::Formatter<'_>, prefix: &str, mask: u8, joiner: &str) -> fmt::Result {
    let parts: Vec<String> = (0..8).filter(|k| mask & (1 << k) != 0).map(|k| format!("{prefix}{}", k + 1)).collect();
    write!(f, "{}", parts.join(joiner))
}

impl fmt::Display for BigradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (&(j, i), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if j != 0 {
                write!(f, " ")?;
                fmt_mask(f, "dy", j, "^")?;
            }
            if i != 0 {
                write!(f, " ⊗ ")?;
                fmt_mask(f, "dx", i, "^")?;
            }
        }
        Ok(())
    }
}
