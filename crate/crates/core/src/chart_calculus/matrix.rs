//! Small symbolic matrices (n ≤ 3).

use nalgebra::DMatrix;

use super::complex::CExpr;
use super::expr::{Point, ScalarExpr};

pub type SymMatrix = Vec<Vec<ScalarExpr>>;

fn minor(m: &[Vec<ScalarExpr>], row: usize, col: usize) -> SymMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

pub fn det(m: &[Vec<ScalarExpr>]) -> ScalarExpr {
    match m.len() {
        0 => ScalarExpr::one(),
        1 => m[0][0].clone(),
        _ => (0..m.len()).fold(ScalarExpr::zero(), |acc, j| {
            let term = &m[0][j] * &det(&minor(m, 0, j));
            if j % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        }),
    }
}

/// Inverse as adjugate over determinant.
pub fn inverse(m: &[Vec<ScalarExpr>]) -> SymMatrix {
    let n = m.len();
    let d = det(m);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = det(&minor(m, j, i));
                    let c = if (i + j) % 2 == 0 { c } else { -c };
                    &c / &d
                })
                .collect()
        })
        .collect()
}

pub fn eval(m: &[Vec<ScalarExpr>], p: &Point) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j].eval(p))
}

pub fn deps(m: &[Vec<ScalarExpr>]) -> u16 {
    m.iter().flatten().fold(0, |acc, e| acc | e.deps())
}

pub fn re_part(m: &[Vec<CExpr>]) -> SymMatrix {
    m.iter().map(|r| r.iter().map(|c| c.re.clone()).collect()).collect()
}

pub fn im_part(m: &[Vec<CExpr>]) -> SymMatrix {
    m.iter().map(|r| r.iter().map(|c| c.im.clone()).collect()).collect()
}
