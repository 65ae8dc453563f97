//! Cohomology of the pushforward of a local system from a punctured sphere.
//!
//! The sheaf on S^2 has stalk ker(T_i - I) at the i-th marked point and no higher
//! cohomology on small discs around it. Cohomology is computed by Mayer-Vietoris for
//! the cover {k discs, k-holed sphere P}, overlapping in k annuli:
//!
//! ```text
//! C^0 = (+)_i ker(T_i - I)  (+)  M
//! C^1 = M^(k-1)  (+)  M^k          group 1-cochains of P, annulus 0-cochains
//! C^2 = M^k                        annulus 1-cochains
//! ```
//!
//! with d0(x, p) = (((T_j - I) p)_{j<k}, (x_i - p)_i) and
//! d1(c, y) = (-c(gamma_i) - (T_i - I) y_i)_i.
//! P retracts onto a wedge of the loops gamma_1..gamma_{k-1}. A 1-cocycle c on its
//! fundamental group satisfies c(gh) = c(g) + g c(h), and the relation
//! gamma_k ... gamma_1 = 1 gives, by the Fox derivative of the word,
//! c(gamma_k) = -T_k sum_{j<k} T_{k-1} ... T_{j+1} c(gamma_j).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::{kernel_basis, rank, subquotient, AbelianGroup, IntMatrix, SnfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheafError {
    #[error("at least one marked point is required")]
    NoMarkedPoints,
    #[error("monodromy {index} has shape {rows}x{cols}, expected {rank}x{rank}")]
    Shape { index: usize, rows: usize, cols: usize, rank: usize },
    #[error("monodromy {index} is not invertible over the integers (determinant {det})")]
    NotInvertible { index: usize, det: i128 },
    #[error("the product T_k ... T_1 is not the identity")]
    RelationViolated,
    #[error(transparent)]
    Snf(#[from] SnfError),
}

/// Rank-m local system on S^2 minus k points, given by the monodromies of
/// counterclockwise loops gamma_1..gamma_k with gamma_k ... gamma_1 = 1.
#[derive(Clone, Debug)]
pub struct LocalSystemOnSphere {
    rank: usize,
    monodromy: Vec<IntMatrix>,
}

/// JSON form: row-major integer matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromySpec {
    pub rank: usize,
    pub monodromy: Vec<Vec<Vec<i64>>>,
}

impl LocalSystemOnSphere {
    pub fn new(rank: usize, monodromy: Vec<IntMatrix>) -> Result<Self, SheafError> {
        if monodromy.is_empty() {
            return Err(SheafError::NoMarkedPoints);
        }
        let mut product = IntMatrix::identity(rank);
        for (index, t) in monodromy.iter().enumerate() {
            if t.rows() != rank || t.cols() != rank {
                return Err(SheafError::Shape { index, rows: t.rows(), cols: t.cols(), rank });
            }
            let det = t.determinant()?;
            if det.abs() != 1 {
                return Err(SheafError::NotInvertible { index, det });
            }
            product = t.mul(&product)?;
        }
        if product != IntMatrix::identity(rank) {
            return Err(SheafError::RelationViolated);
        }
        Ok(Self { rank, monodromy })
    }

    pub fn from_spec(spec: &MonodromySpec) -> Result<Self, SheafError> {
        let mats = spec
            .monodromy
            .iter()
            .map(|rows| if rows.is_empty() { Ok(IntMatrix::zeros(0, 0)) } else { IntMatrix::from_rows(rows) })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(spec.rank, mats)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn points(&self) -> usize {
        self.monodromy.len()
    }

    pub fn monodromy(&self) -> &[IntMatrix] {
        &self.monodromy
    }

    /// Conjugates every monodromy by `g`: T_i -> g T_i g^-1.
    pub fn conjugate(&self, g: &IntMatrix) -> Result<Self, SheafError> {
        let g_inv = g.unimodular_inverse()?;
        let mats = self
            .monodromy
            .iter()
            .map(|t| g.mul(t)?.mul(&g_inv))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.rank, mats)
    }

    fn minus_identity(&self, i: usize) -> IntMatrix {
        self.monodromy[i].sub(&IntMatrix::identity(self.rank)).expect("square")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PushforwardCohomology {
    /// H^0, H^1, H^2 with invariant factors.
    pub groups: [AbelianGroup; 3],
}

impl PushforwardCohomology {
    pub fn ranks(&self) -> (usize, usize, usize) {
        (self.groups[0].rank, self.groups[1].rank, self.groups[2].rank)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (a, b, c) = self.ranks();
        a as i64 - b as i64 + c as i64
    }
}

/// The Mayer-Vietoris cochain complex; exposed for inspection.
#[derive(Clone, Debug)]
pub struct MayerVietoris {
    pub d0: IntMatrix,
    pub d1: IntMatrix,
}

pub fn mayer_vietoris(ls: &LocalSystemOnSphere) -> Result<MayerVietoris, SheafError> {
    let m = ls.rank;
    let k = ls.points();
    let kernels = (0..k).map(|i| kernel_basis(&ls.minus_identity(i))).collect::<Result<Vec<_>, _>>()?;
    let disc_dim: usize = kernels.iter().map(IntMatrix::cols).sum();
    let n0 = disc_dim + m;
    let n1 = m * (k - 1) + m * k;
    let n2 = m * k;
    let p_col = disc_dim;
    let annulus_row = m * (k - 1);

    let mut d0 = IntMatrix::zeros(n1, n0);
    for j in 0..k - 1 {
        put(&mut d0, j * m, p_col, &ls.minus_identity(j), 1);
    }
    let mut col = 0;
    for (i, kb) in kernels.iter().enumerate() {
        put(&mut d0, annulus_row + i * m, col, kb, 1);
        put(&mut d0, annulus_row + i * m, p_col, &IntMatrix::identity(m), -1);
        col += kb.cols();
    }

    // Fox derivative of the relation, expressed on the free generators.
    let mut fox = vec![IntMatrix::zeros(m, m); k - 1];
    let mut suffix = ls.monodromy[k - 1].clone();
    for j in (0..k - 1).rev() {
        fox[j] = suffix.clone();
        suffix = suffix.mul(&ls.monodromy[j])?;
    }

    let mut d1 = IntMatrix::zeros(n2, n1);
    for i in 0..k {
        let row = i * m;
        if i < k - 1 {
            put(&mut d1, row, i * m, &IntMatrix::identity(m), -1);
        } else {
            for (j, f) in fox.iter().enumerate() {
                put(&mut d1, row, j * m, f, 1);
            }
        }
        put(&mut d1, row, annulus_row + i * m, &ls.minus_identity(i), -1);
    }
    Ok(MayerVietoris { d0, d1 })
}

fn put(target: &mut IntMatrix, r0: usize, c0: usize, block: &IntMatrix, sign: i128) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            target.add_to(r0 + i, c0 + j, sign * block.get(i, j));
        }
    }
}

pub fn pushforward_cohomology(ls: &LocalSystemOnSphere) -> Result<PushforwardCohomology, SheafError> {
    let mv = mayer_vietoris(ls)?;
    let (n0, n1, n2) = (mv.d0.cols(), mv.d0.rows(), mv.d1.rows());
    let h0 = subquotient(&mv.d0, &IntMatrix::zeros(n0, 0), n0)?;
    let h1 = subquotient(&mv.d1, &mv.d0, n1)?;
    let h2 = subquotient(&IntMatrix::zeros(0, n2), &mv.d1, n2)?;
    Ok(PushforwardCohomology { groups: [h0, h1, h2] })
}

/// 2m - sum_i (m - rank ker(T_i - I)).
pub fn euler_characteristic(ls: &LocalSystemOnSphere) -> Result<i64, SheafError> {
    let m = ls.rank as i64;
    let mut chi = 2 * m;
    for i in 0..ls.points() {
        let invariant = m - rank(&ls.minus_identity(i))? as i64;
        chi -= m - invariant;
    }
    Ok(chi)
}
