//! Symbolic scalar fields on a chart `U × T^n` and the bigraded algebra
//! `Ω_U^{p,q}` of base forms tensored with fibre multivectors.

mod chart;
mod complex;
mod expr;
mod form;
mod graded;
pub mod matrix;
mod parse;
mod poly;
mod quadrature;

use thiserror::Error;

pub use chart::{max_over, sup_abs, sup_abs_real, Chart, SampleGrid};
pub use complex::{CExpr, ComplexText};
pub use expr::{Point, ScalarExpr, Var};
pub use form::Form;
pub use graded::{koszul, BigradedElement, Bidegree, GradedOperator};
pub use parse::parse_expr;
pub use poly::Poly;
pub use quadrature::{gauss_legendre, integrate, integrate_expr, Domain, Integrand, LatticeTorus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported dimension {0} (expected 1..=3)")]
    UnsupportedDimension(usize),
    #[error("empty or non-finite interval on base axis {0}")]
    EmptyBox(usize),
    #[error("degree {degree} out of range for n = {n}")]
    DegreeOutOfRange { degree: i32, n: usize },
    #[error("expected bidegree {expected:?}, found {found:?}")]
    WrongBidegree { expected: (i32, i32), found: Option<(i32, i32)> },
    #[error("operator order {0} not supported (use 2 or 3)")]
    UnsupportedOrder(usize),
    #[error("expected {expected} arguments, got {got}")]
    ArgumentCount { expected: usize, got: usize },
    #[error("field is not periodic along the fibre: {0}")]
    NotPeriodic(String),
    #[error("quadrature resolution must be positive")]
    ZeroResolution,
}
