use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syzlab_lattice::k3::{
    double_mirror_check, fibrewise_negation, hyperkahler_rotate, int_class, mirror_classes, sublattice_quotient,
    validate_and_align, Class, GramLattice, K3Error, K3InputSpec, K3MirrorInput,
};
use syzlab_lattice::surd::Surd;

// Basis of U^3: e1, f1, e2, f2, e3, f3.
fn u3(coords: [i64; 6]) -> Class {
    int_class(&coords)
}

fn toy() -> K3MirrorInput {
    K3MirrorInput {
        lattice: GramLattice::hyperbolic(3),
        fibre: vec![1, 0, 0, 0, 0, 0],
        section: vec![-1, 1, 0, 0, 0, 0],
        omega: u3([0, 0, 1, 1, 0, 0]),
        b_field: u3([0; 6]),
        re_omega: u3([1, 1, 0, 0, 0, 0]),
        im_omega: u3([0, 0, 0, 0, 1, 1]),
    }
}

#[test]
fn presets() {
    let k3 = GramLattice::k3();
    assert_eq!(k3.rank(), 22);
    assert!(k3.is_unimodular().unwrap());
    assert!(k3.is_even());
    assert!(GramLattice::hyperbolic(3).is_unimodular().unwrap());
    assert!(GramLattice::new("bad", vec![vec![0, 1], vec![2, 0]]).is_err());
}

#[test]
fn toy_mirror() {
    let aligned = validate_and_align(&toy()).unwrap();
    assert_eq!(aligned.input, toy());
    assert_eq!(aligned.volume, Surd::one());
    let m = mirror_classes(&aligned.input).unwrap();
    assert!(m.passed(), "{:?}", m.checks);
    assert_eq!(m.omega_n.0, u3([1, 1, 0, 0, 0, 0]));
    assert_eq!(m.omega_n.1, u3([0, 0, -1, -1, 0, 0]));
    let l = &aligned.input.lattice;
    assert_eq!(l.dot(&m.omega_n.0, &m.omega_n.0), Surd::from_int(2));
    assert_eq!(l.dot(&m.omega_n.1, &m.omega_n.1), Surd::from_int(2));
}

#[test]
fn hyperkahler_rotation() {
    let hk = hyperkahler_rotate(&toy()).unwrap();
    let l = GramLattice::hyperbolic(3);
    let e = int_class(&toy().fibre);
    assert_eq!(l.dot(&hk.kahler_k, &e), Surd::one());
    let mut unaligned = toy();
    std::mem::swap(&mut unaligned.re_omega, &mut unaligned.im_omega);
    assert!(matches!(hyperkahler_rotate(&unaligned), Err(K3Error::NotAligned(_))));
}

#[test]
fn quarter_turn_alignment() {
    // Re Omega . E = 0 and Im Omega . E = 1: the new Re Omega is the old Im Omega.
    let mut input = toy();
    input.im_omega = toy().re_omega;
    input.re_omega = toy().im_omega.iter().map(|x| -x).collect();
    let aligned = validate_and_align(&input).unwrap();
    assert_eq!(aligned.input.re_omega, input.im_omega);
    assert_eq!(aligned.phase, (Surd::zero(), Surd::from_int(-1)));
}

#[test]
fn validation_errors() {
    let mut bad = toy();
    bad.section = vec![0, 1, 0, 0, 0, 0];
    let err = validate_and_align(&bad).unwrap_err();
    assert!(matches!(err, K3Error::SectionSelfIntersection(_)));
    assert!(err.to_string().contains("section self-intersection"));

    let mut bad = toy();
    bad.fibre = vec![2, 0, 0, 0, 0, 0];
    assert!(matches!(validate_and_align(&bad), Err(K3Error::FibreNotPrimitive(2))));

    let mut bad = toy();
    bad.omega = u3([0, 0, 1, 2, 0, 0]);
    assert!(matches!(validate_and_align(&bad), Err(K3Error::Normalization(_))));

    let mut bad = toy();
    bad.re_omega = u3([0, 0, 0, 0, 1, -1]);
    bad.im_omega = u3([0, 0, 0, 0, 1, 1]);
    assert!(validate_and_align(&bad).is_err());
}

#[test]
fn b_field_lift_is_reduced() {
    let mut input = toy();
    // B = E is orthogonal to E but not to sigma0; it reduces to zero.
    input.b_field = u3([1, 0, 0, 0, 0, 0]);
    assert_eq!(validate_and_align(&input).unwrap().input.b_field, u3([0; 6]));
}

#[test]
fn quotient_lattices() {
    let e: Vec<i64> = (0..22).map(|i| i64::from(i == 0)).collect();
    let q = sublattice_quotient(&GramLattice::k3(), &e).unwrap();
    assert_eq!(q.lattice.rank(), 20);
    assert!(q.lattice.is_unimodular().unwrap());
    assert!(q.lattice.is_even());

    let uu = sublattice_quotient(&GramLattice::hyperbolic(2), &[1, 0, 0, 0]).unwrap();
    assert_eq!(uu.lattice.rank(), 2);
    // Even, unimodular and indefinite of rank two: the hyperbolic plane.
    assert_eq!(uu.lattice.determinant().unwrap(), -1);
    assert!(uu.lattice.is_even());
    // The representatives span the second hyperbolic block modulo E.
    for r in &uu.representatives {
        assert_eq!(GramLattice::hyperbolic(2).dot_int(r, &[1, 0, 0, 0]), 0);
    }

    assert!(matches!(
        sublattice_quotient(&GramLattice::hyperbolic(2), &[2, 0, 0, 0]),
        Err(K3Error::FibreNotPrimitive(2))
    ));
    assert!(matches!(
        sublattice_quotient(&GramLattice::hyperbolic(2), &[1, 1, 0, 0]),
        Err(K3Error::FibreNotIsotropic(_))
    ));
}

#[test]
fn quotient_of_a_non_basis_fibre() {
    // E = e1 + e2 mixes two hyperbolic blocks.
    let u3l = GramLattice::hyperbolic(3);
    let e = [1, 0, 1, 0, 0, 0];
    let q = sublattice_quotient(&u3l, &e).unwrap();
    assert_eq!(q.lattice.rank(), 4);
    assert_eq!(q.lattice.determinant().unwrap(), 1);
}

fn rat(rng: &mut ChaCha8Rng) -> Surd {
    let den = rng.gen_range(1..=4);
    Surd::from_ratio(rng.gen_range(-6..=6), den)
}

/// (cos, sin) of a rational rotation from a Pythagorean parametrization.
fn rational_turn(rng: &mut ChaCha8Rng) -> (Surd, Surd) {
    let t = rat(rng);
    let one = Surd::one();
    let tt = &t * &t;
    let den = &one + &tt;
    (&(&one - &tt) / &den, &(&Surd::from_int(2) * &t) / &den)
}

/// Coordinates in W = span(e2, f2, e3, f3) from (p2, q2, p3, q3) in the orthogonal
/// basis u_i = e_i + f_i (square 2), n_i = e_i - f_i (square -2).
fn from_diagonal(p2: &Surd, q2: &Surd, p3: &Surd, q3: &Surd) -> Class {
    let z = Surd::zero();
    vec![z.clone(), z, p2 + q2, p2 - q2, p3 + q3, p3 - q3]
}

/// Two orthogonal vectors in W with squares c and kappa c (c > 0), after a random
/// rotation of the positive plane and of the negative plane.
fn positive_pair(rng: &mut ChaCha8Rng, kappa: i64) -> (Class, Class) {
    loop {
        let (p, q) = (rat(rng), rat(rng));
        let d = &(&p * &p) - &(&q * &q);
        if !d.is_positive() {
            continue;
        }
        // p'^2 - q'^2 = kappa d via p' - q' = t, p' + q' = kappa d / t.
        let t = rat(rng);
        if t.is_zero() {
            continue;
        }
        let s = &(&Surd::from_int(kappa) * &d) / &t;
        let half = Surd::from_ratio(1, 2);
        let p3 = &half * &(&s + &t);
        let q3 = &half * &(&s - &t);
        // (p u2 + q n2, p3 u3 + q3 n3), then rotate (u2, u3) and (n2, n3).
        let (c1, s1) = rational_turn(rng);
        let (c2, s2) = rational_turn(rng);
        let rot = |a: &Surd, b: &Surd, c: &Surd, s: &Surd| (&(c * a) - &(s * b), &(s * a) + &(c * b));
        let (x_u2, x_u3) = rot(&p, &Surd::zero(), &c1, &s1);
        let (x_n2, x_n3) = rot(&q, &Surd::zero(), &c2, &s2);
        let (y_u2, y_u3) = rot(&Surd::zero(), &p3, &c1, &s1);
        let (y_n2, y_n3) = rot(&Surd::zero(), &q3, &c2, &s2);
        return (from_diagonal(&x_u2, &x_n2, &x_u3, &x_n3), from_diagonal(&y_u2, &y_n2, &y_u3, &y_n3));
    }
}

fn random_w(rng: &mut ChaCha8Rng) -> Class {
    let z = Surd::zero();
    vec![z.clone(), z, rat(rng), rat(rng), rat(rng), rat(rng)]
}

fn lin(terms: &[(&Surd, &Class)]) -> Class {
    let mut out = vec![Surd::zero(); 6];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o = &*o + &(*c * x);
        }
    }
    out
}

/// A valid input over U^3 with E = e1, sigma0 = f1 - e1. With `irrational` the
/// holomorphic form is presented rotated so that the fibre volume is V sqrt 2.
fn random_input(rng: &mut ChaCha8Rng, irrational: bool) -> K3MirrorInput {
    let l = GramLattice::hyperbolic(3);
    let e = u3([1, 0, 0, 0, 0, 0]);
    let s0 = u3([-1, 1, 0, 0, 0, 0]);
    let kappa = if irrational { 2 } else { 1 };
    let (s_w, w_w) = positive_pair(rng, kappa);
    let c = l.dot(&s_w, &s_w);
    let r_w = random_w(rng);
    let b = random_w(rng);
    let v = loop {
        let v = rat(rng);
        if v.is_positive() {
            break v;
        }
    };
    let lambda_s = -(&l.dot(&r_w, &s_w) / &v);
    let lambda_w = -(&l.dot(&r_w, &w_w) / &v);
    let two = Surd::from_int(2);
    let beta = &(&(&c + &(&two * &(&v * &v))) - &l.dot(&r_w, &r_w)) / &(&two * &v);
    let re = lin(&[(&v, &s0), (&beta, &e), (&Surd::one(), &r_w)]);
    let im = lin(&[(&lambda_s, &e), (&Surd::one(), &s_w)]);
    let omega = lin(&[(&lambda_w, &e), (&Surd::one(), &w_w)]);

    let (re, im) = if irrational {
        // sqrt 2 times a 45 degree turn keeps the classes rational.
        (lin(&[(&Surd::one(), &re), (&Surd::from_int(-1), &im)]), lin(&[(&Surd::one(), &re), (&Surd::one(), &im)]))
    } else {
        // A rational turn with both Re Omega.E and Im Omega.E nonzero.
        let (co, si) = rational_turn(rng);
        (lin(&[(&co, &re), (&si, &im)]), lin(&[(&-&si, &re), (&co, &im)]))
    };
    K3MirrorInput {
        lattice: l,
        fibre: vec![1, 0, 0, 0, 0, 0],
        section: vec![-1, 1, 0, 0, 0, 0],
        omega,
        b_field: b,
        re_omega: re,
        im_omega: im,
    }
}

#[test]
fn class_identities_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut irrational_volumes = 0;
    for case in 0..100 {
        let input = random_input(&mut rng, case % 4 == 3);
        input.validate().unwrap_or_else(|e| panic!("case {case}: generator produced invalid input: {e}"));
        let aligned = validate_and_align(&input).unwrap();
        let m = mirror_classes(&aligned.input).unwrap();
        assert!(m.passed(), "case {case}: {:?}", m.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert_eq!(&m.volume * &m.mirror_volume, Surd::one());
        if m.volume.as_rational().is_none() {
            irrational_volumes += 1;
        }
        hyperkahler_rotate(&aligned.input).unwrap();
    }
    assert_eq!(irrational_volumes, 25);
}

#[test]
fn double_mirror_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..30 {
        let input = random_input(&mut rng, case % 3 == 0);
        let report = double_mirror_check(&input).unwrap();
        assert!(report.passed(), "case {case}: {:?}", report.checks);
    }
}

#[test]
fn double_mirror_examples() {
    assert!(double_mirror_check(&toy()).unwrap().passed());
    let mut twisted = toy();
    twisted.b_field = u3([0, 0, 1, -1, 0, 0]);
    let l = GramLattice::hyperbolic(3);
    assert_eq!(l.dot(&twisted.b_field, &twisted.b_field), Surd::from_int(-2));
    let report = double_mirror_check(&twisted).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
}

#[test]
fn negation_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let input = toy();
    for _ in 0..20 {
        let x: Class = (0..6).map(|_| rat(&mut rng)).collect();
        assert_eq!(fibrewise_negation(&input, &fibrewise_negation(&input, &x)), x);
    }
    assert_eq!(fibrewise_negation(&input, &int_class(&input.fibre)), int_class(&input.fibre));
    assert_eq!(fibrewise_negation(&input, &int_class(&input.section)), int_class(&input.section));
}

#[test]
fn scaling_the_kahler_class() {
    // Scaling omega and Omega by t keeps the input valid; [omega]^2 Vol^2 = omega^2 scales by t^2.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10 {
        let input = validate_and_align(&random_input(&mut rng, false)).unwrap().input;
        let base = mirror_classes(&input).unwrap();
        let t = Surd::from_ratio(rng.gen_range(1..=5), rng.gen_range(1..=3));
        let mut scaled = input.clone();
        for v in [&mut scaled.omega, &mut scaled.re_omega, &mut scaled.im_omega] {
            *v = v.iter().map(|x| &t * x).collect();
        }
        let m = mirror_classes(&scaled).unwrap();
        let l = &input.lattice;
        let lhs = &l.dot(&m.omega, &m.omega) * &(&m.volume * &m.volume);
        let rhs = &l.dot(&base.omega, &base.omega) * &(&base.volume * &base.volume);
        assert_eq!(lhs, &(&t * &t) * &rhs);
        assert_eq!(lhs, l.dot(&scaled.omega, &scaled.omega));
    }
    // With B = 0, only the fibre volume sets [Re Omega].E.
    let m = mirror_classes(&toy()).unwrap();
    assert_eq!(GramLattice::hyperbolic(3).dot(&m.re_omega, &int_class(&toy().fibre)), Surd::one());
}

#[test]
fn json_input() {
    let text = r#"{
        "lattice": "U3",
        "fibre": [1, 0, 0, 0, 0, 0],
        "section": [-1, 1, 0, 0, 0, 0],
        "omega": [0, 0, 1, 1, 0, 0],
        "b_field": [0, 0, "1/2", "-1/2", 0, 0],
        "re_omega": [1, 1, 0, 0, 0, 0],
        "im_omega": [0, 0, 0, 0, 1, 1]
    }"#;
    let spec: K3InputSpec = serde_json::from_str(text).unwrap();
    let input = spec.to_input().unwrap();
    assert_eq!(input.b_field[2], Surd::from_ratio(1, 2));
    assert!(mirror_classes(&validate_and_align(&input).unwrap().input).unwrap().passed());
}
