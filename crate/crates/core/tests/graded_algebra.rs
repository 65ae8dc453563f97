mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use syzlab_core::chart_calculus::{koszul, BigradedElement, CExpr, Form, GradedOperator, ScalarExpr};

const TOL: f64 = 1e-10;

fn deg(e: &BigradedElement) -> (i32, i32) {
    e.bidegree().expect("homogeneous")
}

/// Homogeneous part of a random element, picked so it is non-zero.
fn homogeneous(rng: &mut ChaCha8Rng, n: usize) -> BigradedElement {
    let e = element(rng, n);
    e.homogeneous_parts().into_iter().next().map(|(_, p)| p).unwrap_or(e)
}

/// Bracket of two `(-1,1)` elements by the vector-field formula
/// `[f dy_j ∂_i, g dy_l ∂_k] = f ∂_i g dy_j dy_l ∂_k − ∂_k f g dy_j dy_l ∂_i`.
fn vector_field_bracket(a: &BigradedElement, b: &BigradedElement) -> BigradedElement {
    let n = a.n();
    let mut out = BigradedElement::zero(n);
    let bit = |m: u8| m.trailing_zeros() as usize;
    for (&(ja, ia), f) in a.terms() {
        for (&(jb, ib), g) in b.terms() {
            let (j, i, l, k) = (bit(ja), bit(ia), bit(jb), bit(ib));
            let xi = syzlab_core::chart_calculus::Var::X(i);
            let xk = syzlab_core::chart_calculus::Var::X(k);
            out.insert(&[j, l], &[k], f * &g.diff(xi));
            out.insert(&[j, l], &[i], -(&f.diff(xk) * g));
        }
    }
    out
}

/// `⋀_i (dx_i + Σ_j β_ij dy_j)` by direct wedge expansion.
fn wedge_expansion(beta: &[Vec<CExpr>]) -> Form {
    let n = beta.len();
    let mut acc = Form::scalar(n, CExpr::one());
    for i in 0..n {
        let mut factor = Form::dx(n, i);
        for (j, c) in beta[i].iter().enumerate() {
            factor = factor.add(&Form::dy(n, j).scale(c));
        }
        acc = acc.wedge(&factor);
    }
    acc
}

fn run(seed: u64, n: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = points(&mut rng, n, 100);
    let a = homogeneous(&mut rng, n);
    let b = homogeneous(&mut rng, n);
    let c = homogeneous(&mut rng, n);
    let (da, db, dc) = (deg(&a), deg(&b), deg(&c));

    // graded commutativity and associativity
    let ab = a.product(&b);
    let ba = b.product(&a).scale_i64(koszul(da, db));
    assert!(max_coeff(&ab.sub(&ba), &pts) < TOL);
    let assoc = ab.product(&c).sub(&a.product(&b.product(&c)));
    assert!(max_coeff(&assoc, &pts) < TOL);

    // d² = 0 and anticommutation
    assert!(max_coeff(&a.d_x().d_x(), &pts) < TOL);
    assert!(max_coeff(&a.d_y().d_y(), &pts) < TOL);
    assert!(max_coeff(&a.d_x().d_y().add(&a.d_y().d_x()), &pts) < TOL);

    // exterior derivative oracle
    let lhs = a.d_x().add(&a.d_y()).to_form();
    let rhs = a.to_form().d();
    assert!(max_form_coeff(&lhs.sub(&rhs), &pts) < TOL);
    assert!(max_coeff(&BigradedElement::from_form(&a.to_form()).sub(&a), &pts) == 0.0);

    // (5.3): d'(ab) = [a,b] + d'(a) b + (-1)^{|a||b|} d'(b) a
    let dp = GradedOperator::DxPrime;
    let r53 = dp
        .apply(&ab)
        .sub(&a.bracket(&b))
        .sub(&dp.apply(&a).product(&b))
        .sub(&dp.apply(&b).product(&a).scale_i64(koszul(da, db)));
    assert!(max_coeff(&r53, &pts) < TOL);

    // (5.4): [a, bc] = [a,b] c + (-1)^{|b||c|} [a,c] b
    let r54 = a
        .bracket(&b.product(&c))
        .sub(&a.bracket(&b).product(&c))
        .sub(&a.bracket(&c).product(&b).scale_i64(koszul(db, dc)));
    assert!(max_coeff(&r54, &pts) < TOL);

    // (5.5): d_y(ab) = d_y(a) b + (-1)^{|a||b|} d_y(b) a
    let r55 = ab.d_y().sub(&a.d_y().product(&b)).sub(&b.d_y().product(&a).scale_i64(koszul(da, db)));
    assert!(max_coeff(&r55, &pts) < TOL);

    // operator orders
    assert!(max_coeff(&GradedOperator::DxPrime.phi3(&a, &b, &c), &pts) < TOL);
    assert!(max_coeff(&GradedOperator::Dy.phi2(&a, &b), &pts) < TOL);

    // bracket on (-1,1) elements against the vector-field formula
    let u = beta_like(&mut rng, n);
    let v = beta_like(&mut rng, n);
    assert!(max_coeff(&u.bracket(&v).sub(&vector_field_bracket(&u, &v)), &pts) < TOL);

    // exp(β) against the wedge expansion
    let e = u.exp_beta().unwrap().to_form();
    assert!(max_form_coeff(&e.sub(&wedge_expansion(&u.to_matrix())), &pts) < TOL);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn graded_identities_n1(seed in any::<u64>()) { run(seed, 1); }

    #[test]
    fn graded_identities_n2(seed in any::<u64>()) { run(seed, 2); }

    #[test]
    fn graded_identities_n3(seed in any::<u64>()) { run(seed, 3); }
}

fn real(e: ScalarExpr) -> CExpr {
    CExpr::real(e)
}

#[test]
fn d_x_example() {
    let e = BigradedElement::term(2, &[0], &[0, 1], real(ScalarExpr::mode(1, 0).sin()));
    let got = e.d_x();
    let want = BigradedElement::term(
        2,
        &[0],
        &[1],
        real(ScalarExpr::int(2) * ScalarExpr::pi() * ScalarExpr::mode(1, 0).cos()),
    );
    let pts = points(&mut ChaCha8Rng::seed_from_u64(1), 2, 20);
    assert!(max_coeff(&got.sub(&want), &pts) < TOL);
}

#[test]
fn bracket_example() {
    let a = BigradedElement::term(2, &[0], &[0], real(ScalarExpr::mode(1, 1).sin()));
    let b = BigradedElement::term(2, &[1], &[1], real(ScalarExpr::one()));
    let want = BigradedElement::term(
        2,
        &[0, 1],
        &[0],
        real(-(ScalarExpr::int(2) * ScalarExpr::pi() * ScalarExpr::mode(1, 1).cos())),
    );
    let pts = points(&mut ChaCha8Rng::seed_from_u64(2), 2, 20);
    assert!(max_coeff(&a.bracket(&b).sub(&want), &pts) < TOL);
}

#[test]
fn to_form_second_basis_vector() {
    let e = BigradedElement::term(2, &[1], &[1], real(ScalarExpr::one())).to_form();
    let want = Form::dx(2, 0).wedge(&Form::dy(2, 1));
    assert!(e.sub(&want).is_zero());
}

#[test]
fn exp_diagonal_n2_exact() {
    let b11 = real(ScalarExpr::y(0));
    let b22 = real(ScalarExpr::frac(3, 2));
    let beta = BigradedElement::from_matrix(&[vec![b11.clone(), CExpr::zero()], vec![CExpr::zero(), b22.clone()]]);
    let f = beta.exp_beta().unwrap().to_form();
    let want = Form::dx(2, 0)
        .wedge(&Form::dx(2, 1))
        .add(&Form::dx(2, 0).wedge(&Form::dy(2, 1)).scale(&b22))
        .add(&Form::dy(2, 0).wedge(&Form::dx(2, 1)).scale(&b11))
        .add(&Form::dy(2, 0).wedge(&Form::dy(2, 1)).scale(&(&b11 * &b22)));
    let diff = f.sub(&want);
    for (_, c) in diff.terms() {
        assert!(c.re.to_poly().unwrap().is_zero() && c.im.to_poly().unwrap().is_zero());
    }
}

#[test]
fn order_defect_rejects_other_orders() {
    let a = BigradedElement::one(2);
    assert!(GradedOperator::Dx.order_defect(&[a.clone()]).is_err());
    assert!(GradedOperator::Dx.order_defect(&[a.clone(), a.clone(), a.clone(), a]).is_err());
}
