//! Finite cellular chain complexes and their integral (co)homology.

use serde::Serialize;
use thiserror::Error;

use crate::snf::{subquotient, AbelianGroup, IntMatrix, SnfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("boundary of dimension {dim} has shape {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape { dim: usize, rows: usize, cols: usize, want_rows: usize, want_cols: usize },
    #[error("label count for dimension {0} does not match the cell count")]
    Labels(usize),
    #[error("boundary squared is nonzero in dimension {0}")]
    BoundarySquared(usize),
    #[error(transparent)]
    Snf(#[from] SnfError),
}

/// Cells per dimension, boundary matrices and labels.
///
/// `boundaries[k - 1]` is the matrix of the boundary from k-cells to (k-1)-cells,
/// of shape `cells[k - 1] x cells[k]`.
#[derive(Clone, Debug)]
pub struct CellComplex {
    labels: Vec<Vec<String>>,
    boundaries: Vec<IntMatrix>,
}

impl CellComplex {
    pub fn new(labels: Vec<Vec<String>>, boundaries: Vec<IntMatrix>) -> Result<Self, ComplexError> {
        let top = labels.len().saturating_sub(1);
        if boundaries.len() != top {
            return Err(ComplexError::Labels(boundaries.len()));
        }
        for (i, b) in boundaries.iter().enumerate() {
            let k = i + 1;
            let (want_rows, want_cols) = (labels[k - 1].len(), labels[k].len());
            if b.rows() != want_rows || b.cols() != want_cols {
                return Err(ComplexError::Shape {
                    dim: k,
                    rows: b.rows(),
                    cols: b.cols(),
                    want_rows,
                    want_cols,
                });
            }
        }
        let c = Self { labels, boundaries };
        if let Some(k) = c.boundary_squared_defect()? {
            return Err(ComplexError::BoundarySquared(k));
        }
        Ok(c)
    }

    /// Dimension of the top cells.
    pub fn dim(&self) -> usize {
        self.labels.len().saturating_sub(1)
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, k: usize) -> &[String] {
        self.labels.get(k).map_or(&[], Vec::as_slice)
    }

    /// Boundary from k-cells to (k-1)-cells; the zero map when k is 0 or above the top.
    pub fn boundary(&self, k: usize) -> IntMatrix {
        let count = |d: usize| self.labels.get(d).map_or(0, Vec::len);
        if k == 0 || k > self.dim() {
            let rows = if k == 0 { 0 } else { count(k - 1) };
            return IntMatrix::zeros(rows, count(k));
        }
        self.boundaries[k - 1].clone()
    }

    /// First k with a nonzero composite boundary, if any.
    pub fn boundary_squared_defect(&self) -> Result<Option<usize>, ComplexError> {
        for k in 2..=self.dim() {
            if !self.boundaries[k - 2].mul(&self.boundaries[k - 1])?.is_zero() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.labels
            .iter()
            .enumerate()
            .map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    pub fn homology(&self) -> Result<Vec<AbelianGroup>, ComplexError> {
        (0..=self.dim())
            .map(|k| {
                let n = self.labels[k].len();
                Ok(subquotient(&self.boundary(k), &self.boundary(k + 1), n)?)
            })
            .collect()
    }

    /// Cohomology from the coboundary maps (transposed boundaries).
    pub fn cohomology(&self) -> Result<Vec<AbelianGroup>, ComplexError> {
        (0..=self.dim())
            .map(|k| {
                let n = self.labels[k].len();
                let out = self.boundary(k + 1).transpose();
                let inc = self.boundary(k).transpose();
                Ok(subquotient(&out, &inc, n)?)
            })
            .collect()
    }

    /// Cartesian product cell structure with the sign rule d(a x b) = da x b + (-1)^|a| a x db.
    pub fn product(&self, other: &CellComplex) -> Result<CellComplex, ComplexError> {
        let dim = self.dim() + other.dim();
        let mut index: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); dim + 1];
        let mut labels = vec![Vec::new(); dim + 1];
        for p in 0..=self.dim() {
            for q in 0..=other.dim() {
                for (a, la) in self.labels[p].iter().enumerate() {
                    for (b, lb) in other.labels[q].iter().enumerate() {
                        index[p + q].push((p, a, b));
                        labels[p + q].push(format!("{la}*{lb}"));
                    }
                }
            }
        }
        let position = |d: usize, p: usize, a: usize, b: usize| {
            index[d].iter().position(|&c| c == (p, a, b)).expect("product cell exists")
        };
        let mut boundaries = Vec::with_capacity(dim);
        for k in 1..=dim {
            let mut m = IntMatrix::zeros(index[k - 1].len(), index[k].len());
            for (col, &(p, a, b)) in index[k].iter().enumerate() {
                let q = k - p;
                if p > 0 {
                    let da = self.boundary(p);
                    for r in 0..da.rows() {
                        let c = da.get(r, a);
                        if c != 0 {
                            m.add_to(position(k - 1, p - 1, r, b), col, c);
                        }
                    }
                }
                if q > 0 {
                    let db = other.boundary(q);
                    let sign = if p % 2 == 0 { 1 } else { -1 };
                    for r in 0..db.rows() {
                        let c = db.get(r, b);
                        if c != 0 {
                            m.add_to(position(k - 1, p, a, r), col, sign * c);
                        }
                    }
                }
            }
            boundaries.push(m);
        }
        CellComplex::new(labels, boundaries)
    }
}

/// Circle with `m` vertices and `m` edges; edge i runs from vertex i to vertex i+1.
pub fn circle(m: usize) -> CellComplex {
    assert!(m >= 1, "a circle needs at least one vertex");
    let labels = vec![
        (0..m).map(|i| format!("v{i}")).collect(),
        (0..m).map(|i| format!("e{i}")).collect(),
    ];
    let mut d = IntMatrix::zeros(m, m);
    for i in 0..m {
        d.add_to((i + 1) % m, i, 1);
        d.add_to(i, i, -1);
    }
    CellComplex::new(labels, vec![d]).expect("circle complex is valid")
}

/// Integral cohomology with ranks and invariant factors per degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyResult {
    pub degrees: Vec<AbelianGroup>,
}

impl CohomologyResult {
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|g| g.rank).collect()
    }

    pub fn b(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |g| g.rank)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees
            .iter()
            .enumerate()
            .map(|(k, g)| if k % 2 == 0 { g.rank as i64 } else { -(g.rank as i64) })
            .sum()
    }
}

pub fn integral_cohomology(c: &CellComplex) -> Result<CohomologyResult, ComplexError> {
    if let Some(k) = c.boundary_squared_defect()? {
        return Err(ComplexError::BoundarySquared(k));
    }
    Ok(CohomologyResult { degrees: c.cohomology()? })
}
