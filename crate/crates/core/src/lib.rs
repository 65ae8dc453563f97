//! Symbolic and numerical tools for semi-flat torus fibrations: a bigraded
//! calculus on charts, semi-flat structures built from a β matrix, and
//! dual-fibration checks.

pub mod chart_calculus;
pub mod conventions;
pub mod duality;
pub mod report;
pub mod semiflat;

pub use report::{Check, Relation, SemiflatReport};
