//! Differential forms on a chart `U × T^n`, written in the basis
//! `dy_J ∧ dx_K` (all base differentials first, each block increasing).
//!
//! This is the reference representation: the exterior derivative here is
//! computed directly from coefficient derivatives and serves as the oracle
//! for the bigraded differentials.

use std::collections::BTreeMap;

use super::chart::{sup_abs, Chart, SampleGrid};
use super::complex::CExpr;
use super::expr::{ScalarExpr, Var};
use super::CalculusError;

/// Sign of concatenating the ordered index sets `a` then `b`, or 0 if they overlap.
pub(crate) fn merge_sign(a: u8, b: u8) -> i64 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0;
    for bit in 0..8 {
        if b & (1 << bit) != 0 {
            inversions += (a >> (bit + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn mask_of(indices: &[usize]) -> Option<(u8, i64)> {
    // returns the mask and the sign of sorting `indices`, None on repeats
    let mut mask = 0u8;
    let mut sign = 1;
    for &i in indices {
        let bit = 1u8 << i;
        if mask & bit != 0 {
            return None;
        }
        if (mask >> (i + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= bit;
    }
    Some((mask, sign))
}

pub(crate) fn full_mask(n: usize) -> u8 {
    ((1u16 << n) - 1) as u8
}

/// A (possibly inhomogeneous) complex differential form.
#[derive(Clone, Debug)]
pub struct Form {
    n: usize,
    terms: BTreeMap<(u8, u8), CExpr>,
}

impl Form {
    pub fn zero(n: usize) -> Self {
        Form { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: CExpr) -> Self {
        let mut f = Form::zero(n);
        f.accumulate(0, 0, c);
        f
    }

    /// `c · dy_{ys} ∧ dx_{xs}` with arbitrary index order (zero-based).
    pub fn term(n: usize, ys: &[usize], xs: &[usize], c: CExpr) -> Self {
        let mut f = Form::zero(n);
        if let (Some((j, s1)), Some((k, s2))) = (mask_of(ys), mask_of(xs)) {
            f.accumulate(j, k, c.scale_i64(s1 * s2));
        }
        f
    }

    pub fn dy(n: usize, i: usize) -> Self {
        Self::term(n, &[i], &[], CExpr::one())
    }

    pub fn dx(n: usize, i: usize) -> Self {
        Self::term(n, &[], &[i], CExpr::one())
    }

    /// `ω = Σ dx_i ∧ dy_i`.
    pub fn standard_symplectic(n: usize) -> Self {
        (0..n).fold(Form::zero(n), |acc, i| acc.add(&Form::dx(n, i).wedge(&Form::dy(n, i))))
    }

    /// `Ω_0 = dx_1 ∧ … ∧ dx_n`.
    pub fn fibre_volume(n: usize) -> Self {
        let mut f = Form::zero(n);
        f.accumulate(0, full_mask(n), CExpr::one());
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u8, u8), &CExpr)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, ymask: u8, xmask: u8) -> CExpr {
        self.terms.get(&(ymask, xmask)).cloned().unwrap_or_else(CExpr::zero)
    }

    pub(crate) fn accumulate(&mut self, j: u8, k: u8, c: CExpr) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.remove(&(j, k)) {
            Some(old) => &old + &c,
            None => c,
        };
        if !next.is_zero() {
            self.terms.insert((j, k), next);
        }
    }

    fn check(&self, other: &Form) -> Result<(), CalculusError> {
        if self.n != other.n {
            return Err(CalculusError::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Form {
        let mut out = self.clone();
        for (&(j, k), c) in &other.terms {
            out.accumulate(j, k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.scale(&CExpr::real(ScalarExpr::int(-1))))
    }

    pub fn try_add(&self, other: &Form) -> Result<Form, CalculusError> {
        self.check(other)?;
        Ok(self.add(other))
    }

    pub fn scale(&self, c: &CExpr) -> Form {
        let mut out = Form::zero(self.n);
        for (&(j, k), a) in &self.terms {
            out.accumulate(j, k, a * c);
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&CExpr) -> CExpr) -> Form {
        let mut out = Form::zero(self.n);
        for (&(j, k), a) in &self.terms {
            out.accumulate(j, k, f(a));
        }
        out
    }

    pub fn re(&self) -> Form {
        self.map_coefficients(|c| CExpr::real(c.re.clone()))
    }

    pub fn im(&self) -> Form {
        self.map_coefficients(|c| CExpr::real(c.im.clone()))
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero(self.n);
        for (&(j1, k1), a) in &self.terms {
            for (&(j2, k2), b) in &other.terms {
                let sj = merge_sign(j1, j2);
                let sk = merge_sign(k1, k2);
                if sj == 0 || sk == 0 {
                    continue;
                }
                // move dy_{J2} across dx_{K1}
                let swap = if (k1.count_ones() * j2.count_ones()) % 2 == 0 { 1 } else { -1 };
                out.accumulate(j1 | j2, k1 | k2, (a * b).scale_i64(sj * sk * swap));
            }
        }
        out
    }

    pub fn try_wedge(&self, other: &Form) -> Result<Form, CalculusError> {
        self.check(other)?;
        Ok(self.wedge(other))
    }

    fn differential(&self, base: bool, fibre: bool) -> Form {
        let n = self.n;
        let mut out = Form::zero(n);
        for (&(j, k), c) in &self.terms {
            let basis = Form { n, terms: BTreeMap::from([((j, k), CExpr::one())]) };
            for i in 0..n {
                if base && c.deps() & ScalarExpr::y(i).deps() != 0 {
                    let dc = c.diff(Var::Y(i));
                    out = out.add(&Form::dy(n, i).wedge(&basis).scale(&dc));
                }
                if fibre && c.deps() & ScalarExpr::x(i).deps() != 0 {
                    let dc = c.diff(Var::X(i));
                    out = out.add(&Form::dx(n, i).wedge(&basis).scale(&dc));
                }
            }
        }
        out
    }

    /// Exterior derivative on the total space.
    pub fn d(&self) -> Form {
        self.differential(true, true)
    }

    /// Exterior derivative along the fibres only (base coordinates frozen).
    pub fn d_fibre(&self) -> Form {
        self.differential(false, true)
    }

    /// Front-slot contraction with `Σ vy_j ∂/∂y_j + Σ vx_i ∂/∂x_i`.
    pub fn contract(&self, vy: &[CExpr], vx: &[CExpr]) -> Form {
        let mut out = Form::zero(self.n);
        for (&(j, k), c) in &self.terms {
            for (i, v) in vy.iter().enumerate() {
                if v.is_zero() || j & (1 << i) == 0 {
                    continue;
                }
                let before = (j & ((1u8 << i) - 1)).count_ones();
                let s = if before % 2 == 0 { 1 } else { -1 };
                out.accumulate(j & !(1 << i), k, (c * v).scale_i64(s));
            }
            for (i, v) in vx.iter().enumerate() {
                if v.is_zero() || k & (1 << i) == 0 {
                    continue;
                }
                let before = j.count_ones() + (k & ((1u8 << i) - 1)).count_ones();
                let s = if before % 2 == 0 { 1 } else { -1 };
                out.accumulate(j, k & !(1 << i), (c * v).scale_i64(s));
            }
        }
        out
    }

    /// `ι(∂/∂y_j)`.
    pub fn interior_y(&self, j: usize) -> Form {
        let mut vy = vec![CExpr::zero(); self.n];
        vy[j] = CExpr::one();
        self.contract(&vy, &[])
    }

    /// `ι(∂/∂x_i)`.
    pub fn interior_x(&self, i: usize) -> Form {
        let mut vx = vec![CExpr::zero(); self.n];
        vx[i] = CExpr::one();
        self.contract(&[], &vx)
    }

    /// Restriction to a fibre `{y = const}`: drops every term containing a `dy`.
    pub fn restrict_to_fibre(&self) -> Form {
        let mut out = Form::zero(self.n);
        for (&(j, k), c) in &self.terms {
            if j == 0 {
                out.accumulate(0, k, c.clone());
            }
        }
        out
    }

    /// Pullback along the coordinate map whose components are given as
    /// expressions: `ys[i] = y_i ∘ φ`, `xs[i] = x_i ∘ φ`.
    pub fn pullback(&self, ys: &[ScalarExpr], xs: &[ScalarExpr]) -> Form {
        let n = self.n;
        let subst = |v: Var| match v {
            Var::Y(i) => ys.get(i).cloned(),
            Var::X(i) => xs.get(i).cloned(),
            Var::B(_) => None,
        };
        let one_form = |e: &ScalarExpr| {
            (0..n).fold(Form::zero(n), |acc, i| {
                acc.add(&Form::dy(n, i).scale(&CExpr::real(e.diff(Var::Y(i)))))
                    .add(&Form::dx(n, i).scale(&CExpr::real(e.diff(Var::X(i)))))
            })
        };
        let dys: Vec<Form> = ys.iter().map(one_form).collect();
        let dxs: Vec<Form> = xs.iter().map(one_form).collect();
        let mut out = Form::zero(n);
        for (&(j, k), c) in &self.terms {
            let mut piece = Form::scalar(n, c.substitute(&subst));
            for i in (0..n).filter(|i| j & (1 << i) != 0) {
                piece = piece.wedge(&dys[i]);
            }
            for i in (0..n).filter(|i| k & (1 << i) != 0) {
                piece = piece.wedge(&dxs[i]);
            }
            out = out.add(&piece);
        }
        out
    }

    /// Largest coefficient magnitude over the sample grid.
    pub fn sup_norm(&self, chart: &Chart, grid: &SampleGrid) -> f64 {
        self.terms.values().map(|c| sup_abs(c, chart, grid)).fold(0.0, f64::max)
    }
}
