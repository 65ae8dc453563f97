//! Lattice-level mirror map for an elliptically fibred K3 surface with a section.
//!
//! Inputs are classes over an even lattice: the fibre class E, a section class
//! sigma0, the Kahler class omega, a B-field and the real and imaginary parts of
//! the holomorphic two-form. All arithmetic is exact over Q(sqrt d).

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::{smith, AbelianGroup, IntMatrix, SnfError};
use crate::surd::{Surd, SurdError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum K3Error {
    #[error("Gram matrix is not square")]
    GramShape,
    #[error("Gram matrix is not symmetric")]
    GramAsymmetric,
    #[error("lattice is not unimodular (determinant {0})")]
    NotUnimodular(i128),
    #[error("vector {name} has length {len}, lattice rank is {rank}")]
    Length { name: &'static str, len: usize, rank: usize },
    #[error("fibre class is not isotropic: E.E = {0}")]
    FibreNotIsotropic(String),
    #[error("fibre class is not primitive (gcd {0})")]
    FibreNotPrimitive(i64),
    #[error("section self-intersection is {0}, expected -2")]
    SectionSelfIntersection(String),
    #[error("section meets the fibre with multiplicity {0}, expected 1")]
    SectionFibre(String),
    #[error("{0} is not orthogonal to the fibre class: value {1}")]
    NotOrthogonalToFibre(&'static str, String),
    #[error("B-field lift is not orthogonal to the section: B.sigma0 = {0}")]
    BFieldLift(String),
    #[error("normalization violated: {0}")]
    Normalization(String),
    #[error("fibre class is null against the holomorphic form")]
    FibreNullAgainstOmega,
    #[error("holomorphic form is not phase aligned: {0}")]
    NotAligned(String),
    #[error("phase angle is not exactly representable: {0}")]
    PhaseNotExact(String),
    #[error("lattice is degenerate along the fibre class")]
    Degenerate,
    #[error("hyperkahler rotation check failed: {0}")]
    Rotation(String),
    #[error("unknown lattice preset {0:?}")]
    UnknownPreset(String),
    #[error("bad rational entry {0:?}")]
    BadRational(String),
    #[error(transparent)]
    Snf(#[from] SnfError),
    #[error(transparent)]
    Surd(#[from] SurdError),
}

/// Symmetric integer bilinear form on Z^r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GramLattice {
    pub name: String,
    pub gram: Vec<Vec<i64>>,
}

const E8_CARTAN: [[i64; 8]; 8] = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
];

impl GramLattice {
    pub fn new(name: impl Into<String>, gram: Vec<Vec<i64>>) -> Result<Self, K3Error> {
        let r = gram.len();
        if gram.iter().any(|row| row.len() != r) {
            return Err(K3Error::GramShape);
        }
        for i in 0..r {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(K3Error::GramAsymmetric);
                }
            }
        }
        Ok(Self { name: name.into(), gram })
    }

    /// Orthogonal sum of k hyperbolic planes, basis e1, f1, e2, f2, ...
    pub fn hyperbolic(k: usize) -> Self {
        let mut g = vec![vec![0; 2 * k]; 2 * k];
        for i in 0..k {
            g[2 * i][2 * i + 1] = 1;
            g[2 * i + 1][2 * i] = 1;
        }
        Self { name: format!("U^{k}"), gram: g }
    }

    /// Three hyperbolic planes followed by two copies of E8(-1).
    pub fn k3() -> Self {
        let mut g = Self::hyperbolic(3).gram;
        for row in &mut g {
            row.resize(22, 0);
        }
        g.resize(22, vec![0; 22]);
        for block in 0..2 {
            let o = 6 + 8 * block;
            for i in 0..8 {
                for j in 0..8 {
                    g[o + i][o + j] = -E8_CARTAN[i][j];
                }
            }
        }
        Self { name: "K3".into(), gram: g }
    }

    pub fn preset(name: &str) -> Result<Self, K3Error> {
        match name {
            "K3" => Ok(Self::k3()),
            "U" => Ok(Self::hyperbolic(1)),
            "U2" => Ok(Self::hyperbolic(2)),
            "U3" => Ok(Self::hyperbolic(3)),
            other => Err(K3Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.gram).expect("square")
    }

    pub fn determinant(&self) -> Result<i128, K3Error> {
        Ok(self.matrix().determinant()?)
    }

    pub fn is_unimodular(&self) -> Result<bool, K3Error> {
        Ok(self.determinant()?.abs() == 1)
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[i][i] % 2 == 0)
    }

    pub fn dot_int(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                s += xi * self.gram[i][j] * yj;
            }
        }
        s
    }

    pub fn dot(&self, x: &[Surd], y: &[Surd]) -> Surd {
        let mut s = Surd::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let mut row = Surd::zero();
            for (j, yj) in y.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 && !yj.is_zero() {
                    row = &row + &(yj * &Surd::from_int(g));
                }
            }
            s = &s + &(xi * &row);
        }
        s
    }
}

pub type Class = Vec<Surd>;

pub fn int_class(v: &[i64]) -> Class {
    v.iter().map(|&x| Surd::from_int(x)).collect()
}

fn add(x: &[Surd], y: &[Surd]) -> Class {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn sub(x: &[Surd], y: &[Surd]) -> Class {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn scale(c: &Surd, x: &[Surd]) -> Class {
    x.iter().map(|a| c * a).collect()
}

/// x + c y
fn axpy(x: &[Surd], c: &Surd, y: &[Surd]) -> Class {
    x.iter().zip(y).map(|(a, b)| a + &(c * b)).collect()
}

pub fn render_class(x: &[Surd]) -> String {
    format!("[{}]", x.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K3MirrorInput {
    pub lattice: GramLattice,
    pub fibre: Vec<i64>,
    pub section: Vec<i64>,
    pub omega: Class,
    pub b_field: Class,
    pub re_omega: Class,
    pub im_omega: Class,
}

/// A rational coordinate: an integer or a string "p/q".
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalEntry {
    Int(i64),
    Text(String),
}

impl RationalEntry {
    pub fn to_surd(&self) -> Result<Surd, K3Error> {
        match self {
            Self::Int(n) => Ok(Surd::from_int(*n)),
            Self::Text(s) => {
                let bad = || K3Error::BadRational(s.clone());
                let (p, q) = match s.split_once('/') {
                    Some((p, q)) => (p.trim(), q.trim()),
                    None => (s.trim(), "1"),
                };
                let p: i64 = p.parse().map_err(|_| bad())?;
                let q: i64 = q.parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Surd::from_ratio(p, q))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Preset(String),
    Gram { name: Option<String>, gram: Vec<Vec<i64>> },
}

/// JSON form of [`K3MirrorInput`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct K3InputSpec {
    pub lattice: LatticeSpec,
    pub fibre: Vec<i64>,
    pub section: Vec<i64>,
    pub omega: Vec<RationalEntry>,
    pub b_field: Vec<RationalEntry>,
    pub re_omega: Vec<RationalEntry>,
    pub im_omega: Vec<RationalEntry>,
}

impl K3InputSpec {
    pub fn to_input(&self) -> Result<K3MirrorInput, K3Error> {
        let lattice = match &self.lattice {
            LatticeSpec::Preset(name) => GramLattice::preset(name)?,
            LatticeSpec::Gram { name, gram } => {
                GramLattice::new(name.clone().unwrap_or_else(|| "custom".into()), gram.clone())?
            }
        };
        let conv = |v: &[RationalEntry]| v.iter().map(RationalEntry::to_surd).collect::<Result<Vec<_>, _>>();
        Ok(K3MirrorInput {
            lattice,
            fibre: self.fibre.clone(),
            section: self.section.clone(),
            omega: conv(&self.omega)?,
            b_field: conv(&self.b_field)?,
            re_omega: conv(&self.re_omega)?,
            im_omega: conv(&self.im_omega)?,
        })
    }
}

impl K3MirrorInput {
    pub fn fibre_class(&self) -> Class {
        int_class(&self.fibre)
    }

    pub fn section_class(&self) -> Class {
        int_class(&self.section)
    }

    fn dot(&self, x: &[Surd], y: &[Surd]) -> Surd {
        self.lattice.dot(x, y)
    }

    /// Every invariant except the phase condition Im Omega . E = 0.
    pub fn validate(&self) -> Result<(), K3Error> {
        let r = self.lattice.rank();
        for (name, len) in [
            ("fibre", self.fibre.len()),
            ("section", self.section.len()),
            ("omega", self.omega.len()),
            ("b_field", self.b_field.len()),
            ("re_omega", self.re_omega.len()),
            ("im_omega", self.im_omega.len()),
        ] {
            if len != r {
                return Err(K3Error::Length { name, len, rank: r });
            }
        }
        let e2 = self.lattice.dot_int(&self.fibre, &self.fibre);
        if e2 != 0 {
            return Err(K3Error::FibreNotIsotropic(e2.to_string()));
        }
        let g = self.fibre.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g != 1 {
            return Err(K3Error::FibreNotPrimitive(g));
        }
        let s2 = self.lattice.dot_int(&self.section, &self.section);
        if s2 != -2 {
            return Err(K3Error::SectionSelfIntersection(s2.to_string()));
        }
        let se = self.lattice.dot_int(&self.section, &self.fibre);
        if se != 1 {
            return Err(K3Error::SectionFibre(se.to_string()));
        }
        let e = self.fibre_class();
        for (name, v) in [("omega", &self.omega), ("B-field", &self.b_field)] {
            let x = self.dot(v, &e);
            if !x.is_zero() {
                return Err(K3Error::NotOrthogonalToFibre(name, x.to_string()));
            }
        }
        let bs = self.dot(&self.b_field, &self.section_class());
        if !bs.is_zero() {
            return Err(K3Error::BFieldLift(bs.to_string()));
        }
        let w2 = self.dot(&self.omega, &self.omega);
        if !w2.is_positive() {
            return Err(K3Error::Normalization(format!("omega.omega = {w2} is not positive")));
        }
        let checks = [
            ("Re Omega.Re Omega - omega.omega", &self.dot(&self.re_omega, &self.re_omega) - &w2),
            ("Im Omega.Im Omega - omega.omega", &self.dot(&self.im_omega, &self.im_omega) - &w2),
            ("Re Omega.Im Omega", self.dot(&self.re_omega, &self.im_omega)),
            ("omega.Re Omega", self.dot(&self.omega, &self.re_omega)),
            ("omega.Im Omega", self.dot(&self.omega, &self.im_omega)),
        ];
        for (name, v) in checks {
            if !v.is_zero() {
                return Err(K3Error::Normalization(format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    /// Re Omega . E, provided Im Omega . E = 0 and Re Omega . E > 0.
    pub fn aligned_volume(&self) -> Result<Surd, K3Error> {
        let e = self.fibre_class();
        let im = self.dot(&self.im_omega, &e);
        if !im.is_zero() {
            return Err(K3Error::NotAligned(format!("Im Omega.E = {im}")));
        }
        let re = self.dot(&self.re_omega, &e);
        if !re.is_positive() {
            return Err(K3Error::NotAligned(format!("Re Omega.E = {re} is not positive")));
        }
        Ok(re)
    }
}

/// Replaces B by the lift B - (B.sigma0) E, which is orthogonal to the section.
pub fn reduce_b_lift(input: &K3MirrorInput) -> K3MirrorInput {
    let mut out = input.clone();
    let bs = input.lattice.dot(&input.b_field, &input.section_class());
    out.b_field = axpy(&input.b_field, &-bs, &input.fibre_class());
    out
}

#[derive(Clone, Debug)]
pub struct Aligned {
    pub input: K3MirrorInput,
    /// Vol(S_b) = Re Omega . E after alignment.
    pub volume: Surd,
    /// (cos theta, sin theta) of the applied phase.
    pub phase: (Surd, Surd),
}

/// Rotates Omega by the phase making Im Omega . E = 0 and Re Omega . E > 0, after
/// reducing the B-field lift.
pub fn validate_and_align(input: &K3MirrorInput) -> Result<Aligned, K3Error> {
    let input = reduce_b_lift(input);
    input.validate()?;
    let e = input.fibre_class();
    let a = input.dot(&input.re_omega, &e);
    let b = input.dot(&input.im_omega, &e);
    if a.is_zero() && b.is_zero() {
        return Err(K3Error::FibreNullAgainstOmega);
    }
    let volume = if b.is_zero() {
        if a.is_positive() {
            a.clone()
        } else {
            -&a
        }
    } else {
        let (Some(qa), Some(qb)) = (a.as_rational(), b.as_rational()) else {
            return Err(K3Error::PhaseNotExact(format!("Re Omega.E = {a}, Im Omega.E = {b}")));
        };
        let s: BigRational = qa * qa + qb * qb;
        Surd::sqrt_rational(&s)?
    };
    let cos = &a / &volume;
    let sin = -(&b / &volume);
    let mut out = input.clone();
    out.re_omega = sub(&scale(&cos, &input.re_omega), &scale(&sin, &input.im_omega));
    out.im_omega = add(&scale(&sin, &input.re_omega), &scale(&cos, &input.im_omega));
    out.validate()?;
    let check = out.aligned_volume()?;
    debug_assert_eq!(check, volume);
    Ok(Aligned { input: out, volume, phase: (cos, sin) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperkahlerClasses {
    /// Omega_K = Im Omega + i omega.
    pub omega_k: (Class, Class),
    /// omega_K = Re Omega.
    pub kahler_k: Class,
}

pub fn hyperkahler_rotate(input: &K3MirrorInput) -> Result<HyperkahlerClasses, K3Error> {
    input.validate()?;
    let vol = input.aligned_volume()?;
    let (re, im) = (input.im_omega.clone(), input.omega.clone());
    let kahler = input.re_omega.clone();
    let l = &input.lattice;
    let sq_re = &l.dot(&re, &re) - &l.dot(&im, &im);
    let sq_im = l.dot(&re, &im);
    if !sq_re.is_zero() || !sq_im.is_zero() {
        return Err(K3Error::Rotation(format!("Omega_K^2 = {sq_re} + {sq_im} i")));
    }
    if !l.dot(&kahler, &kahler).is_positive() {
        return Err(K3Error::Rotation("omega_K^2 is not positive".into()));
    }
    let ke = l.dot(&kahler, &input.fibre_class());
    if ke != vol {
        return Err(K3Error::Rotation(format!("omega_K.E = {ke} differs from the fibre volume {vol}")));
    }
    Ok(HyperkahlerClasses { omega_k: (re, im), kahler_k: kahler })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCheck {
    pub name: &'static str,
    pub passed: bool,
    pub value: String,
}

#[derive(Clone, Debug)]
pub struct MirrorClasses {
    pub omega: Class,
    /// [Omega_n] of the mirror as (real, imaginary) parts.
    pub omega_n: (Class, Class),
    pub re_omega: Class,
    pub im_omega: Class,
    /// Dual B-field lift, orthogonal to E and sigma0.
    pub b_field: Class,
    pub volume: Surd,
    pub mirror_volume: Surd,
    pub checks: Vec<ClassCheck>,
}

impl MirrorClasses {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Mirror classes of an aligned input.
pub fn mirror_classes(input: &K3MirrorInput) -> Result<MirrorClasses, K3Error> {
    input.validate()?;
    let vol = input.aligned_volume()?;
    let l = &input.lattice;
    let dot = |x: &[Surd], y: &[Surd]| l.dot(x, y);
    let e = input.fibre_class();
    let s0 = input.section_class();
    let (w, b) = (&input.omega, &input.b_field);
    let one = Surd::one();
    let half = Surd::from_ratio(1, 2);

    // [Im Omega_n] = [Im Omega] / Vol
    let im_n = scale(&vol.recip(), &input.im_omega);

    // (B + i omega)^2 = B^2 - omega^2 + 2i B.omega
    let b2 = dot(b, b);
    let w2 = dot(w, w);
    let bw = dot(b, w);
    let ws = dot(w, &s0);
    let c_re = &one - &(&half * &(&b2 - &w2));
    let c_im = &ws - &bw;
    let on_re = axpy(&sub(&s0, b), &c_re, &e);
    let on_im = axpy(&scale(&Surd::from_int(-1), w), &c_im, &e);

    let omega_check = axpy(&im_n, &dot(&im_n, &sub(b, &s0)), &e);
    let shift = &half * &(&(&b2 - &w2) - &Surd::from_int(2));
    let re_check = scale(&vol.recip(), &axpy(&sub(&s0, b), &-shift, &e));
    let im_check = scale(&vol.recip(), &on_im);
    let mirror_volume = dot(&re_check, &e);

    let kahler_k_sq = dot(&input.re_omega, &input.re_omega);
    let rs = dot(&scale(&vol.recip(), &input.re_omega), &s0);
    // B-check = [Re Omega_n] - sigma0 + lambda E, with lambda fixing B-check.sigma0 = 0.
    let b_check = axpy(&sub(&scale(&vol.recip(), &input.re_omega), &s0), &-(&Surd::from_int(2) + &rs), &e);

    let mut checks = Vec::new();
    let mut zero = |name: &'static str, v: Surd| {
        checks.push(ClassCheck { name, passed: v.is_zero(), value: v.to_string() });
    };
    zero("[Omega_n]^2 real part", &dot(&on_re, &on_re) - &dot(&on_im, &on_im));
    zero("[Omega_n]^2 imaginary part", dot(&on_re, &on_im));
    zero("[Omega_n].E - 1", &dot(&on_re, &e) - &one);
    zero("[Omega_n].E imaginary part", dot(&on_im, &e));
    zero("[Omega_n].[omega] real part", dot(&on_re, &omega_check));
    zero("[Omega_n].[omega] imaginary part", dot(&on_im, &omega_check));
    zero("[omega].E", dot(&omega_check, &e));
    zero("[omega]^2 Vol^2 - omega_K^2", &(&dot(&omega_check, &omega_check) * &(&vol * &vol)) - &kahler_k_sq);
    zero("Vol * mirror Vol - 1", &(&vol * &mirror_volume) - &one);
    zero("[Re Omega] - Re[Omega_n] / Vol", {
        let diff = sub(&re_check, &scale(&vol.recip(), &on_re));
        diff.iter().fold(Surd::zero(), |acc, x| &acc + &(x * x))
    });
    zero("[Re Omega].[Im Omega]", dot(&re_check, &im_check));
    zero("[Re Omega].[omega]", dot(&re_check, &omega_check));
    zero("[Im Omega].[omega]", dot(&im_check, &omega_check));
    zero("[Im Omega]^2 - [omega]^2", &dot(&im_check, &im_check) - &dot(&omega_check, &omega_check));
    zero("dual B.E", dot(&b_check, &e));
    zero("dual B.sigma0", dot(&b_check, &s0));
    let w2_check = dot(&omega_check, &omega_check);
    checks.push(ClassCheck { name: "[omega]^2 > 0", passed: w2_check.is_positive(), value: w2_check.to_string() });
    checks.push(ClassCheck {
        name: "mirror Vol > 0",
        passed: mirror_volume.is_positive(),
        value: mirror_volume.to_string(),
    });

    Ok(MirrorClasses {
        omega: omega_check,
        omega_n: (on_re, on_im),
        re_omega: re_check,
        im_omega: im_check,
        b_field: b_check,
        volume: vol,
        mirror_volume,
        checks,
    })
}

/// The mirror data as an input on the same lattice, E and sigma0.
pub fn mirror_input(input: &K3MirrorInput, m: &MirrorClasses) -> K3MirrorInput {
    K3MirrorInput {
        lattice: input.lattice.clone(),
        fibre: input.fibre.clone(),
        section: input.section.clone(),
        omega: m.omega.clone(),
        b_field: m.b_field.clone(),
        re_omega: m.re_omega.clone(),
        im_omega: m.im_omega.clone(),
    }
}

/// Fibrewise negation: fixes E and sigma0, negates their orthogonal complement.
/// x = a sigma0 + b E + w maps to a sigma0 + b E - w, with a = x.E, b = x.sigma0 + 2 x.E.
pub fn fibrewise_negation(input: &K3MirrorInput, x: &[Surd]) -> Class {
    let e = input.fibre_class();
    let s0 = input.section_class();
    let a = input.lattice.dot(x, &e);
    let b = &input.lattice.dot(x, &s0) + &(&Surd::from_int(2) * &a);
    let two = Surd::from_int(2);
    let fixed = axpy(&scale(&(&two * &a), &s0), &(&two * &b), &e);
    sub(&fixed, x)
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleMirrorReport {
    pub checks: Vec<ClassCheck>,
}

impl DoubleMirrorReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn double_mirror_check(input: &K3MirrorInput) -> Result<DoubleMirrorReport, K3Error> {
    let aligned = validate_and_align(input)?.input;
    let first = mirror_classes(&aligned)?;
    let mirror = validate_and_align(&mirror_input(&aligned, &first))?.input;
    let second = mirror_classes(&mirror)?;
    let neg = |x: &[Surd]| fibrewise_negation(&aligned, x);
    let mut checks = Vec::new();
    for (name, got, want) in [
        ("omega recovered", neg(&second.omega), &aligned.omega),
        ("Re Omega recovered", neg(&second.re_omega), &aligned.re_omega),
        ("Im Omega recovered", neg(&second.im_omega), &aligned.im_omega),
        ("B-field recovered", neg(&second.b_field), &aligned.b_field),
    ] {
        checks.push(ClassCheck { name, passed: &got == want, value: render_class(&sub(&got, want)) });
    }
    let involutive = [&second.omega, &second.re_omega, &second.im_omega, &second.b_field]
        .iter()
        .all(|x| neg(&neg(x)) == **x);
    checks.push(ClassCheck { name: "negation is an involution", passed: involutive, value: String::new() });
    checks.push(ClassCheck {
        name: "first mirror identities",
        passed: first.passed(),
        value: String::new(),
    });
    checks.push(ClassCheck {
        name: "second mirror identities",
        passed: second.passed(),
        value: String::new(),
    });
    Ok(DoubleMirrorReport { checks })
}

/// E-perp / E with its induced form, and representatives of the basis in the
/// original lattice.
#[derive(Clone, Debug)]
pub struct QuotientLattice {
    pub lattice: GramLattice,
    pub representatives: Vec<Vec<i64>>,
}

pub fn sublattice_quotient(lattice: &GramLattice, e: &[i64]) -> Result<QuotientLattice, K3Error> {
    let r = lattice.rank();
    if e.len() != r {
        return Err(K3Error::Length { name: "fibre", len: e.len(), rank: r });
    }
    let g = e.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g != 1 {
        return Err(K3Error::FibreNotPrimitive(g));
    }
    let e2 = lattice.dot_int(e, e);
    if e2 != 0 {
        return Err(K3Error::FibreNotIsotropic(e2.to_string()));
    }
    // E-perp is the kernel of x -> (G e).x
    let ge: Vec<i64> = (0..r).map(|i| (0..r).map(|j| lattice.gram[i][j] * e[j]).sum()).collect();
    if ge.iter().all(|&x| x == 0) {
        return Err(K3Error::Degenerate);
    }
    let row = IntMatrix::from_rows(&[ge])?;
    let s = smith(&row)?;
    let kernel = s.v.column_block(s.rank, r);
    let e_col = IntMatrix::from_rows(&e.iter().map(|&x| [x]).collect::<Vec<_>>())?;
    let coords = s.v_inv.mul(&e_col)?.row_block(s.rank, r);

    // Extend the (primitive) coordinate vector of E to a basis; the remaining
    // columns span a complement of E inside E-perp.
    let t = smith(&coords)?;
    let basis = t.u.unimodular_inverse()?;
    let complement = kernel.mul(&basis.column_block(1, r - 1))?;
    let reps: Vec<Vec<i64>> = (0..complement.cols())
        .map(|j| (0..r).map(|i| complement.get(i, j) as i64).collect())
        .collect();
    let gram = reps.iter().map(|x| reps.iter().map(|y| lattice.dot_int(x, y)).collect()).collect();
    let name = format!("{}/E", lattice.name);
    Ok(QuotientLattice { lattice: GramLattice::new(name, gram)?, representatives: reps })
}

/// Discriminant group of a lattice (cokernel of its Gram matrix).
pub fn discriminant_group(lattice: &GramLattice) -> Result<AbelianGroup, K3Error> {
    let s = smith(&lattice.matrix())?;
    let torsion = s.divisors.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
    Ok(AbelianGroup { rank: lattice.rank() - s.rank, torsion })
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {})", self.name, self.rank())
    }
}
