use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::CExpr;
use super::expr::{Point, ScalarExpr, X_MASK, Y_MASK};
use super::CalculusError;

/// A box in action coordinates times the unit-lattice torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    n: usize,
    bounds: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(bounds: &[(f64, f64)]) -> Result<Self, CalculusError> {
        let n = bounds.len();
        if !(1..=3).contains(&n) {
            return Err(CalculusError::UnsupportedDimension(n));
        }
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(CalculusError::EmptyBox(i));
            }
        }
        Ok(Chart { n, bounds: bounds.to_vec() })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self, CalculusError> {
        Self::new(&vec![(lo, hi); n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn base_volume(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }

    pub fn contains(&self, other: &Chart) -> bool {
        self.n == other.n
            && self.bounds.iter().zip(&other.bounds).all(|(a, b)| a.0 <= b.0 && b.1 <= a.1)
    }

    /// Uniform base samples including the box corners.
    pub fn base_samples(&self, per_axis: usize) -> Vec<[f64; 3]> {
        let axes: Vec<Vec<f64>> = self
            .bounds
            .iter()
            .map(|&(lo, hi)| {
                if per_axis <= 1 {
                    vec![0.5 * (lo + hi)]
                } else {
                    (0..per_axis).map(|k| lo + (hi - lo) * k as f64 / (per_axis - 1) as f64).collect()
                }
            })
            .collect();
        product_grid(&axes)
    }

    /// Uniform fibre samples `k / per_axis`.
    pub fn fibre_samples(&self, per_axis: usize) -> Vec<[f64; 3]> {
        let axis: Vec<f64> = (0..per_axis.max(1)).map(|k| k as f64 / per_axis.max(1) as f64).collect();
        product_grid(&vec![axis; self.n])
    }
}

pub(crate) fn product_grid(axes: &[Vec<f64>]) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]];
    for (i, axis) in axes.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for p in &out {
            for &v in axis {
                let mut q = *p;
                q[i] = v;
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Sampling density for sup-norm residuals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub base_per_axis: usize,
    pub fibre_per_axis: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid { base_per_axis: 5, fibre_per_axis: 8 }
    }
}

impl SampleGrid {
    /// Sample points restricted to the coordinates a field actually depends on.
    pub fn points_for(&self, chart: &Chart, deps: u16) -> Vec<Point> {
        let base = if deps & Y_MASK != 0 { chart.base_samples(self.base_per_axis) } else { vec![pad(&chart.center())] };
        let fibre = if deps & X_MASK != 0 { chart.fibre_samples(self.fibre_per_axis) } else { vec![[0.0; 3]] };
        let mut pts = Vec::with_capacity(base.len() * fibre.len());
        for y in &base {
            for x in &fibre {
                pts.push(Point { y: *y, x: *x, b: [0.0; 3] });
            }
        }
        pts
    }

    pub fn all_points(&self, chart: &Chart) -> Vec<Point> {
        self.points_for(chart, Y_MASK | X_MASK)
    }
}

pub(crate) fn pad(v: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[..v.len()].copy_from_slice(v);
    out
}

const PARALLEL_THRESHOLD: usize = 2048;

/// Maximum of `f` over points, with the maximizing point (NaN counts as infinite).
pub fn max_over<F>(points: &[Point], f: F) -> (f64, Point)
where
    F: Fn(&Point) -> f64 + Sync,
{
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    let pick = |a: (f64, Point), b: (f64, Point)| if key(b.0) > key(a.0) { b } else { a };
    let init = (f64::NEG_INFINITY, Point::default());
    if points.len() >= PARALLEL_THRESHOLD {
        points.par_iter().map(|p| (key(f(p)), *p)).reduce(|| init, pick)
    } else {
        points.iter().map(|p| (key(f(p)), *p)).fold(init, pick)
    }
}

/// Sup-norm of a complex field over the sample grid.
pub fn sup_abs(field: &CExpr, chart: &Chart, grid: &SampleGrid) -> f64 {
    if field.is_zero() {
        return 0.0;
    }
    let pts = grid.points_for(chart, field.deps());
    max_over(&pts, |p| field.eval(p).norm()).0.max(0.0)
}

pub fn sup_abs_real(field: &ScalarExpr, chart: &Chart, grid: &SampleGrid) -> f64 {
    if field.is_zero() {
        return 0.0;
    }
    let pts = grid.points_for(chart, field.deps());
    max_over(&pts, |p| field.eval(p).abs()).0.max(0.0)
}
