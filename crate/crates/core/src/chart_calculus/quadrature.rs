//! Quadrature on charts: uniform rules on the fibre torus, Gauss-Legendre on
//! the base box, and straight-line rules on integral fibre cycles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::chart::{pad, product_grid, Chart};
use super::complex::CExpr;
use super::expr::Point;
use super::CalculusError;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for k in 0..(m + 1) / 2 {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for l in 2..=m {
                let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[k] = -x;
        nodes[m - 1 - k] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[k] = w;
        weights[m - 1 - k] = w;
    }
    (nodes, weights)
}

/// Region of integration for [`integrate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// The fibre torus over the base point `y`.
    Fibre { y: Vec<f64> },
    /// The base box at fixed fibre point `x`.
    Base { x: Vec<f64> },
    /// Base box times fibre torus.
    Total,
    /// The straight loop `t ↦ x0 + t·direction`, `t ∈ [0, 1]`, over `y`.
    Cycle { y: Vec<f64>, x0: Vec<f64>, direction: Vec<i64> },
}

/// Anything evaluable at a chart point.
pub trait Integrand: Sync {
    fn at(&self, p: &Point) -> Complex64;
}

impl Integrand for CExpr {
    fn at(&self, p: &Point) -> Complex64 {
        self.eval(p)
    }
}

impl<F: Fn(&Point) -> Complex64 + Sync> Integrand for F {
    fn at(&self, p: &Point) -> Complex64 {
        self(p)
    }
}

fn weighted_sum<I: Integrand + ?Sized>(f: &I, pts: &[(Point, f64)]) -> Complex64 {
    if pts.len() >= 4096 {
        pts.par_iter().map(|(p, w)| f.at(p) * *w).sum()
    } else {
        pts.iter().map(|(p, w)| f.at(p) * *w).sum()
    }
}

fn fibre_rule(n: usize, res: usize) -> Vec<([f64; 3], f64)> {
    let axis: Vec<f64> = (0..res).map(|k| k as f64 / res as f64).collect();
    let w = 1.0 / (res as f64).powi(n as i32);
    product_grid(&vec![axis; n]).into_iter().map(|x| (x, w)).collect()
}

fn base_rule(chart: &Chart, res: usize) -> Vec<([f64; 3], f64)> {
    let (t, w) = gauss_legendre(res);
    let mut out = vec![([0.0; 3], 1.0)];
    for (i, &(lo, hi)) in chart.bounds().iter().enumerate() {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut next = Vec::with_capacity(out.len() * res);
        for (p, pw) in &out {
            for (tk, wk) in t.iter().zip(&w) {
                let mut q = *p;
                q[i] = mid + half * tk;
                next.push((q, pw * wk * half));
            }
        }
        out = next;
    }
    out
}

/// Integrates a field over `domain` with `resolution` points per axis.
///
/// Fibre directions use the uniform rectangle rule (exact for trigonometric
/// modes below the resolution), base directions use Gauss-Legendre.
pub fn integrate<I: Integrand + ?Sized>(
    field: &I,
    chart: &Chart,
    domain: &Domain,
    resolution: usize,
) -> Result<Complex64, CalculusError> {
    if resolution == 0 {
        return Err(CalculusError::ZeroResolution);
    }
    let n = chart.n();
    let pts: Vec<(Point, f64)> = match domain {
        Domain::Fibre { y } => {
            check_len(n, y.len())?;
            let y = pad(y);
            fibre_rule(n, resolution).into_iter().map(|(x, w)| (Point { y, x, b: [0.0; 3] }, w)).collect()
        }
        Domain::Base { x } => {
            check_len(n, x.len())?;
            let x = pad(x);
            base_rule(chart, resolution).into_iter().map(|(y, w)| (Point { y, x, b: [0.0; 3] }, w)).collect()
        }
        Domain::Total => {
            let fibre = fibre_rule(n, resolution);
            let mut pts = Vec::new();
            for (y, wy) in base_rule(chart, resolution) {
                for (x, wx) in &fibre {
                    pts.push((Point { y, x: *x, b: [0.0; 3] }, wy * wx));
                }
            }
            pts
        }
        Domain::Cycle { y, x0, direction } => {
            check_len(n, y.len())?;
            check_len(n, x0.len())?;
            check_len(n, direction.len())?;
            let y = pad(y);
            let w = 1.0 / resolution as f64;
            (0..resolution)
                .map(|k| {
                    let t = k as f64 * w;
                    let mut x = [0.0; 3];
                    for i in 0..n {
                        x[i] = x0[i] + t * direction[i] as f64;
                    }
                    (Point { y, x, b: [0.0; 3] }, w)
                })
                .collect()
        }
    };
    Ok(weighted_sum(field, &pts))
}

/// [`integrate`] for symbolic fields, rejecting non-periodic fibre integrands.
pub fn integrate_expr(field: &CExpr, chart: &Chart, domain: &Domain, resolution: usize) -> Result<Complex64, CalculusError> {
    if !matches!(domain, Domain::Base { .. }) && !field.is_fibre_periodic() {
        return Err(CalculusError::NotPeriodic(field.to_string()));
    }
    integrate(field, chart, domain, resolution)
}

fn check_len(n: usize, got: usize) -> Result<(), CalculusError> {
    if n == got {
        Ok(())
    } else {
        Err(CalculusError::DimensionMismatch(n, got))
    }
}

/// The torus `R^n / L` for a lattice `L` spanned by the columns of `basis`.
#[derive(Clone, Debug)]
pub struct LatticeTorus {
    basis: DMatrix<f64>,
}

impl LatticeTorus {
    pub fn new(basis: DMatrix<f64>) -> Self {
        LatticeTorus { basis }
    }

    pub fn covolume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// `∫_{R^n/L} f dx` via the pullback to the unit cube.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync, resolution: usize) -> f64 {
        let n = self.basis.nrows();
        let rule = fibre_rule(n, resolution.max(1));
        let sum: f64 = rule
            .par_iter()
            .map(|(t, w)| {
                let tv = nalgebra::DVector::from_column_slice(&t[..n]);
                let x = &self.basis * tv;
                f(x.as_slice()) * w
            })
            .sum();
        sum * self.covolume()
    }
}
