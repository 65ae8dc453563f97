//! Dense integer matrices, Smith normal form and finitely generated abelian groups.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SnfError {
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("image is not contained in the kernel")]
    NotAComplex,
}

fn ck(v: Option<i128>) -> Result<i128, SnfError> {
    v.ok_or(SnfError::Overflow)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, SnfError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(SnfError::Shape("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| x as i128));
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn diagonal(entries: &[i128]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SnfError> {
        if self.cols != other.rows {
            return Err(SnfError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = ck(out.data[idx].checked_add(ck(a.checked_mul(other.get(k, j)))?))?;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SnfError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(SnfError::Shape("difference of unequal shapes".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| ck(a.checked_sub(*b)))
            .collect::<Result<_, _>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Columns `range` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Self {
        let mut out = Self::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                out.set(i, j - start, self.get(i, j));
            }
        }
        out
    }

    /// Rows `range` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> Self {
        let mut out = Self::zeros(end - start, self.cols);
        for i in start..end {
            for j in 0..self.cols {
                out.set(i - start, j, self.get(i, j));
            }
        }
        out
    }

    /// Stacks matrices with equal column counts vertically.
    pub fn vstack(blocks: &[IntMatrix], cols: usize) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..cols {
                    out.set(r0 + i, j, b.get(i, j));
                }
            }
            r0 += b.rows;
        }
        out
    }

    pub fn determinant(&self) -> Result<i128, SnfError> {
        if self.rows != self.cols {
            return Err(SnfError::Shape("determinant of a non-square matrix".into()));
        }
        bareiss_determinant(self)
    }

    /// Inverse of a matrix with determinant +-1.
    pub fn unimodular_inverse(&self) -> Result<Self, SnfError> {
        if self.rows != self.cols {
            return Err(SnfError::Shape("inverse of a non-square matrix".into()));
        }
        let s = smith(self)?;
        if s.rank < self.rows || s.divisors.iter().any(|&d| d != 1) {
            return Err(SnfError::Shape("matrix is not unimodular".into()));
        }
        // u a v = 1, so a^-1 = v u.
        s.v.mul(&s.u)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i128) -> Result<(), SnfError> {
        for j in 0..self.cols {
            let v = ck(self.get(src, j).checked_mul(k))?;
            let idx = dst * self.cols + j;
            self.data[idx] = ck(self.data[idx].checked_add(v))?;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i128) -> Result<(), SnfError> {
        for i in 0..self.rows {
            let v = ck(self.get(i, src).checked_mul(k))?;
            let idx = i * self.cols + dst;
            self.data[idx] = ck(self.data[idx].checked_add(v))?;
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self.data[r * self.cols + j] = -self.data[r * self.cols + j];
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Fraction-free Bareiss elimination; every division is exact.
fn bareiss_determinant(m: &IntMatrix) -> Result<i128, SnfError> {
    let n = m.rows;
    let mut a = m.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a.get(i, k) != 0) else {
            return Ok(0);
        };
        if p != k {
            a.swap_rows(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = ck(ck(a.get(i, j).checked_mul(a.get(k, k)))?
                    .checked_sub(ck(a.get(i, k).checked_mul(a.get(k, j)))?))?;
                a.set(i, j, v / prev);
            }
        }
        prev = a.get(k, k);
    }
    Ok(if n == 0 { 1 } else { sign * a.get(n - 1, n - 1) })
}

/// Smith normal form `u * a * v = d` with `d` diagonal, positive, each entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub rank: usize,
    /// Nonzero diagonal entries of `d`.
    pub divisors: Vec<i128>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

pub fn smith(a: &IntMatrix) -> Result<Smith, SnfError> {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = min_entry(&d, t..m, t..n) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        loop {
            let p = d.get(t, t);
            let mut clean = true;
            for i in t + 1..m {
                let x = d.get(i, t);
                if x != 0 {
                    let q = x.div_euclid(p);
                    d.add_row(i, t, -q)?;
                    u.add_row(i, t, -q)?;
                    if d.get(i, t) != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                let x = d.get(t, j);
                if x != 0 {
                    let q = x.div_euclid(p);
                    d.add_col(j, t, -q)?;
                    v.add_col(j, t, -q)?;
                    v_inv.add_row(t, j, q)?;
                    if d.get(t, j) != 0 {
                        clean = false;
                    }
                }
            }
            if !clean {
                // Move the smallest remainder in the pivot cross onto the diagonal.
                let col_min = min_entry(&d, t..m, t..t + 1);
                let row_min = min_entry(&d, t..t + 1, t..n);
                let pick = match (col_min, row_min) {
                    (Some(c), Some(r)) => {
                        if d.get(c.0, c.1).abs() <= d.get(r.0, r.1).abs() {
                            c
                        } else {
                            r
                        }
                    }
                    (Some(c), None) => c,
                    (None, Some(r)) => r,
                    (None, None) => unreachable!("pivot is nonzero"),
                };
                d.swap_rows(t, pick.0);
                u.swap_rows(t, pick.0);
                d.swap_cols(t, pick.1);
                v.swap_cols(t, pick.1);
                v_inv.swap_rows(t, pick.1);
                continue;
            }
            let p = d.get(t, t);
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| d.get(i, j) % p != 0));
            match offender {
                Some(i) => {
                    d.add_row(t, i, 1)?;
                    u.add_row(t, i, 1)?;
                }
                None => break,
            }
        }
        if d.get(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let divisors = (0..t).map(|i| d.get(i, i)).collect();
    Ok(Smith { rank: t, divisors, u, v, v_inv })
}

fn min_entry(
    d: &IntMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i128)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = d.get(i, j).abs();
            if x != 0 && best.is_none_or(|b| x < b.2) {
                best = Some((i, j, x));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn rank(a: &IntMatrix) -> Result<usize, SnfError> {
    Ok(smith(a)?.rank)
}

/// A Z-basis of the integer kernel, as the columns of the returned matrix.
pub fn kernel_basis(a: &IntMatrix) -> Result<IntMatrix, SnfError> {
    let s = smith(a)?;
    Ok(s.v.column_block(s.rank, a.cols))
}

/// A finitely generated abelian group Z^rank plus cyclic factors in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct AbelianGroup {
    pub rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        Self { rank, torsion: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    /// Z^rank plus cyclic groups of the given orders, normalized to invariant factors.
    pub fn from_orders(rank: usize, orders: &[u64]) -> Result<Self, SnfError> {
        let extra = orders.iter().filter(|&&o| o == 0).count();
        let diag: Vec<i128> = orders.iter().filter(|&&o| o != 0).map(|&o| o as i128).collect();
        let s = smith(&IntMatrix::diagonal(&diag))?;
        let torsion = s.divisors.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
        Ok(Self { rank: rank + extra, torsion })
    }

    /// Normalizes the torsion list to invariant-factor form.
    pub fn normalized(&self) -> Result<Self, SnfError> {
        Self::from_orders(self.rank, &self.torsion)
    }

    pub fn torsion_order(&self) -> u128 {
        self.torsion.iter().map(|&d| d as u128).product()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(|&d| d <= 1)
    }

    pub fn torsion_part(&self) -> Self {
        Self { rank: 0, torsion: self.torsion.clone() }
    }

    /// Invariant factors are > 1 and each divides the next.
    pub fn is_normal(&self) -> bool {
        self.torsion.iter().all(|&d| d > 1) && self.torsion.windows(2).all(|w| w[1] % w[0] == 0)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `ker(outgoing) / im(incoming)` for composable maps `incoming: Z^a -> Z^n`, `outgoing: Z^n -> Z^b`.
///
/// Either map may have zero rows or columns; shapes are checked against `n`.
pub fn subquotient(outgoing: &IntMatrix, incoming: &IntMatrix, n: usize) -> Result<AbelianGroup, SnfError> {
    if outgoing.cols != n || incoming.rows != n {
        return Err(SnfError::Shape(format!(
            "outgoing has {} columns, incoming has {} rows, middle rank {n}",
            outgoing.cols, incoming.rows
        )));
    }
    let s = smith(outgoing)?;
    let coords = s.v_inv.mul(incoming)?;
    if !coords.row_block(0, s.rank).is_zero() {
        return Err(SnfError::NotAComplex);
    }
    let in_kernel = coords.row_block(s.rank, n);
    let q = smith(&in_kernel)?;
    let torsion = q.divisors.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
    Ok(AbelianGroup { rank: n - s.rank - q.rank, torsion })
}
