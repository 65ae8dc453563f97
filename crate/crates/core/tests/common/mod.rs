#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use syzlab_core::chart_calculus::{BigradedElement, CExpr, Point, ScalarExpr};

pub fn rational(rng: &mut ChaCha8Rng) -> ScalarExpr {
    ScalarExpr::frac(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// Small random field: rational polynomial in y times an optional trig mode in x.
pub fn field(rng: &mut ChaCha8Rng, n: usize) -> ScalarExpr {
    let mut f = rational(rng);
    for _ in 0..rng.gen_range(0..=2) {
        f = f * ScalarExpr::y(rng.gen_range(0..n));
    }
    match rng.gen_range(0..3) {
        0 => f,
        1 => f * ScalarExpr::mode(rng.gen_range(1..=2), rng.gen_range(0..n)).sin(),
        _ => f * ScalarExpr::mode(rng.gen_range(-1..=1), rng.gen_range(0..n)).cos(),
    }
}

pub fn cfield(rng: &mut ChaCha8Rng, n: usize) -> CExpr {
    if rng.gen_bool(0.5) {
        CExpr::new(field(rng, n), field(rng, n))
    } else {
        CExpr::real(field(rng, n))
    }
}

fn subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random inhomogeneous element with a few terms.
pub fn element(rng: &mut ChaCha8Rng, n: usize) -> BigradedElement {
    let mut e = BigradedElement::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        let ys = subset(rng, n);
        let xs = subset(rng, n);
        e.insert(&ys, &xs, cfield(rng, n));
    }
    e
}

/// Random element of bidegree (-1, 1).
pub fn beta_like(rng: &mut ChaCha8Rng, n: usize) -> BigradedElement {
    let mut e = BigradedElement::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        e.insert(&[rng.gen_range(0..n)], &[rng.gen_range(0..n)], cfield(rng, n));
    }
    e
}

pub fn points(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            Point::new(&y, &x)
        })
        .collect()
}

/// Largest coefficient of `e` over the given points.
pub fn max_coeff(e: &BigradedElement, pts: &[Point]) -> f64 {
    e.terms()
        .flat_map(|(_, c)| pts.iter().map(move |p| c.eval(p).norm()))
        .fold(0.0, f64::max)
}

pub fn max_form_coeff(f: &syzlab_core::chart_calculus::Form, pts: &[Point]) -> f64 {
    f.terms()
        .flat_map(|(_, c)| pts.iter().map(move |p| c.eval(p).norm()))
        .fold(0.0, f64::max)
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}
