//! Period embeddings, McLean metrics and the dual fibration of a semi-flat
//! structure; symmetric classes, Hitchin potentials and the Yukawa coupling.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart_calculus::matrix::{self, SymMatrix};
use crate::chart_calculus::{
    integrate, integrate_expr, max_over, sup_abs_real, CExpr, CalculusError, Chart, Domain, Form, LatticeTorus,
    Point, Poly, SampleGrid, ScalarExpr, Var,
};
use crate::report::{Check, SemiflatReport};
use crate::semiflat::{BetaStructure, CheckSettings, SemiflatError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualityError {
    #[error(transparent)]
    Semiflat(#[from] SemiflatError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("cycle of degree {got} given where degree {expected} is required")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("cycle coefficients must be non-zero and of length n")]
    BadCycle,
    #[error("fibre metric depends on fibre coordinates; dualization needs a fibre-constant metric")]
    FibreDependentMetric,
    #[error("tensor entry ({0}, {1}) depends on fibre coordinates")]
    FibreDependentTensor(usize, usize),
    #[error("B-field matrix is not symmetric")]
    AsymmetricBField,
    #[error("Hessian is not positive definite: min eigenvalue {0:e}")]
    HessianNotPositive(f64),
    #[error("family entry ({0}, {1}) is not affine in the parameters")]
    NonAffineFamily(usize, usize),
    #[error("antiderivative of entry ({0}, {1}) is not expressible (non-polynomial)")]
    NotPolynomial(usize, usize),
    #[error("antisymmetric part is not a closed base two-form")]
    NotCocycle,
    #[error("expected {expected} direction vectors of length {expected}")]
    BadDirections { expected: usize },
}

/// Order of the pairing `Λ × ∧^{n-1}Λ → ∧^nΛ` used to identify fibre
/// `(n-1)`-cycles with tangent vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingOrder {
    /// `e_i^* ↔ (-1)^{i-1} e_1 ∧ … ê_i … ∧ e_n`.
    #[default]
    LatticeFirst,
    /// `e_i^* ↔ (-1)^{n-i} e_1 ∧ … ê_i … ∧ e_n`.
    LatticeLast,
}

impl PairingOrder {
    /// Sign attached to `ê_i` (zero-based `i`).
    pub fn sign(self, n: usize, i: usize) -> f64 {
        let k = match self {
            PairingOrder::LatticeFirst => i,
            PairingOrder::LatticeLast => n - 1 - i,
        };
        if k % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Overall sign relating the two orders in the duality identities.
    pub fn epsilon(self, n: usize) -> f64 {
        self.sign(n, 0)
    }
}

/// A fibre homology class over a base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleSpec {
    pub degree: usize,
    pub cycle: Vec<i64>,
    pub at: Vec<f64>,
}

impl CycleSpec {
    /// Coefficients in the `ê_i` basis of `H_{n-1}`.
    pub fn hat_coefficients(&self, n: usize) -> Result<Vec<f64>, DualityError> {
        if self.cycle.len() != n || self.at.len() != n || self.cycle.iter().all(|&c| c == 0) {
            return Err(DualityError::BadCycle);
        }
        let c: Vec<f64> = self.cycle.iter().map(|&k| k as f64).collect();
        match (n, self.degree) {
            // a 1-cycle `Σ k_i e_i` on T²: e_1 = ê_2, e_2 = ê_1
            (2, 1) => Ok(vec![c[1], c[0]]),
            (_, d) if d + 1 == n => Ok(c),
            (_, d) => Err(DualityError::DegreeMismatch { expected: n - 1, got: d }),
        }
    }

    /// The tangent vector `Σ c_i ∂/∂y_i` corresponding to this cycle.
    pub fn tangent(&self, n: usize, order: PairingOrder) -> Result<Vec<f64>, DualityError> {
        let hat = self.hat_coefficients(n)?;
        Ok(hat.iter().enumerate().map(|(i, c)| c * order.sign(n, i)).collect())
    }
}

fn top(n: usize) -> u8 {
    ((1u16 << n) - 1) as u8
}

fn fibre_integral(e: &CExpr, chart: &Chart, y: &[f64], res: usize) -> Result<Complex64, DualityError> {
    Ok(integrate_expr(e, chart, &Domain::Fibre { y: y.to_vec() }, res)?)
}

/// `∫_{ê_i} α` for a fibre `(n-1)`-form, over the subtorus through `x_i = 0`.
fn subtorus_integral(alpha: &Form, i: usize, chart: &Chart, y: &[f64], res: usize) -> Result<f64, DualityError> {
    let n = chart.n();
    let c = alpha.coefficient(0, top(n) & !(1 << i));
    let pinned = c.substitute(&|v| (v == Var::X(i)).then(ScalarExpr::zero));
    Ok(fibre_integral(&pinned, chart, y, res)?.re)
}

/// Provenance of a base metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Quadrature,
    ClosedForm,
}

/// A metric on the base given by fibre integrals `∫ m_ij dx / ∫ ν dx`.
#[derive(Clone, Debug)]
pub struct MetricOnBase {
    pub integrands: Vec<Vec<CExpr>>,
    pub normalizer: Option<CExpr>,
    pub provenance: Provenance,
}

impl MetricOnBase {
    pub fn at(&self, chart: &Chart, y: &[f64], res: usize) -> Result<DMatrix<f64>, DualityError> {
        let n = self.integrands.len();
        let scale = match &self.normalizer {
            Some(v) => fibre_integral(v, chart, y, res)?.re,
            None => 1.0,
        };
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = fibre_integral(&self.integrands[i][j], chart, y, res)?.re / scale;
            }
        }
        Ok(m)
    }
}

/// The McLean metric, its normalized form, the `Θ` density and the fibre volume.
#[derive(Clone, Debug)]
pub struct McLeanMetrics {
    pub h: MetricOnBase,
    pub h_closed_form: MetricOnBase,
    pub h_n: MetricOnBase,
    pub theta: CExpr,
    pub vol: CExpr,
    pub warnings: Vec<String>,
}

impl McLeanMetrics {
    pub fn vol_at(&self, chart: &Chart, y: &[f64], res: usize) -> Result<f64, DualityError> {
        Ok(fibre_integral(&self.vol, chart, y, res)?.re)
    }

    pub fn theta_at(&self, chart: &Chart, y: &[f64], res: usize) -> Result<f64, DualityError> {
        Ok(fibre_integral(&self.theta, chart, y, res)?.re)
    }
}

pub fn mclean_metrics(beta: &BetaStructure, s: &CheckSettings) -> Result<McLeanMetrics, DualityError> {
    beta.ensure_compatible(s)?;
    let n = beta.n();
    let mut warnings = Vec::new();
    if !beta.closedness_residuals(s)?.passed("d_omega") {
        warnings.push("structure is not closed; metrics are computed anyway".to_string());
    }
    let omega = Form::standard_symplectic(n);
    let im_omega = beta.omega_unchecked().to_form().im();
    let full = top(n);

    // h(∂y_i, ∂y_j) = -∫ (ι(∂y_i) ω) ∧ (ι(∂y_j) Im Ω)
    let integrands = (0..n)
        .map(|i| {
            let left = omega.interior_y(i);
            (0..n)
                .map(|j| {
                    let right = im_omega.interior_y(j).restrict_to_fibre();
                    let w = left.wedge(&right).coefficient(0, full);
                    -&w
                })
                .collect()
        })
        .collect();
    let closed = (0..n)
        .map(|i| (0..n).map(|j| CExpr::real(beta.v() * &beta.g_inv()[i][j])).collect())
        .collect();
    let vol = CExpr::real(beta.v().clone());
    let h = MetricOnBase { integrands, normalizer: None, provenance: Provenance::Quadrature };
    let h_n = MetricOnBase { normalizer: Some(vol.clone()), ..h.clone() };
    let h_closed_form = MetricOnBase { integrands: closed, normalizer: None, provenance: Provenance::ClosedForm };

    let theta = (0..n)
        .fold(Form::scalar(n, CExpr::one()), |acc, i| {
            acc.wedge(&omega.interior_y(i).scale(&CExpr::real(ScalarExpr::int(-1))))
        })
        .coefficient(0, full);
    Ok(McLeanMetrics { h, h_closed_form, h_n, theta, vol, warnings })
}

/// `v ↦ -∫_γ ι(v) Im Ω_n` as a covector at the cycle's base point.
pub fn period_one_form(beta: &BetaStructure, cycle: &CycleSpec, res: usize) -> Result<Vec<f64>, DualityError> {
    let n = beta.n();
    let hat = cycle.hat_coefficients(n)?;
    period_covector(beta, &hat, &cycle.at, res)
}

fn period_covector(beta: &BetaStructure, hat: &[f64], y: &[f64], res: usize) -> Result<Vec<f64>, DualityError> {
    let n = beta.n();
    let chart = beta.chart();
    let im_omega = beta.omega_unchecked().to_form().im();
    let vol = fibre_integral(&CExpr::real(beta.v().clone()), chart, y, res)?.re;
    (0..n)
        .map(|j| {
            let alpha = im_omega.interior_y(j).restrict_to_fibre();
            let mut total = 0.0;
            for (i, c) in hat.iter().enumerate() {
                if *c != 0.0 {
                    total += c * subtorus_integral(&alpha, i, chart, y, res)?;
                }
            }
            Ok(-total / vol)
        })
        .collect()
}

/// Finite-difference exterior derivative of `ψ(γ)` at the cycle's base point.
pub fn period_curl(beta: &BetaStructure, cycle: &CycleSpec, res: usize, step: f64) -> Result<f64, DualityError> {
    let n = beta.n();
    let hat = cycle.hat_coefficients(n)?;
    let mut grads = vec![vec![0.0; n]; n];
    for k in 0..n {
        let mut plus = cycle.at.clone();
        let mut minus = cycle.at.clone();
        plus[k] += step;
        minus[k] -= step;
        let a = period_covector(beta, &hat, &plus, res)?;
        let b = period_covector(beta, &hat, &minus, res)?;
        for j in 0..n {
            grads[k][j] = (a[j] - b[j]) / (2.0 * step);
        }
    }
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            worst = worst.max((grads[j][k] - grads[k][j]).abs());
        }
    }
    Ok(worst)
}

/// Residuals of the cycle-pairing identity, the two embeddings of fibre
/// cycles into the cotangent space, and the metric class of `Im Ω_n`.
pub fn duality_identities(
    beta: &BetaStructure,
    cycle: &CycleSpec,
    alpha: &Form,
    order: PairingOrder,
    s: &CheckSettings,
    res: usize,
) -> Result<SemiflatReport, DualityError> {
    let n = beta.n();
    let chart = beta.chart();
    let y = &cycle.at;
    let hat = cycle.hat_coefficients(n)?;
    let v = cycle.tangent(n, order)?;
    let eps = order.epsilon(n);
    let mut r = SemiflatReport::default();

    // ∫_γ α = -∫ ι(γ) ω ∧ α
    let lhs: f64 = hat
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(c * subtorus_integral(alpha, i, chart, y, res)?))
        .sum::<Result<f64, DualityError>>()?;
    let vy: Vec<CExpr> = v.iter().map(|c| CExpr::real(ScalarExpr::float(*c))).collect();
    let omega = Form::standard_symplectic(n);
    let w = omega.contract(&vy, &[]).wedge(&alpha.restrict_to_fibre()).coefficient(0, top(n));
    let rhs = -fibre_integral(&w, chart, y, res)?.re;
    r.push(Check::below("cycle_pairing", (lhs - eps * rhs).abs(), s.tol));
    r.push(Check::info("cycle_pairing_lhs", lhs));

    // ψ(γ) = -h_n(γ, ·)
    let metrics = mclean_metrics(beta, s)?;
    let h_n = metrics.h_n.at(chart, y, res)?;
    let psi = period_covector(beta, &hat, y, res)?;
    let mut gap: f64 = 0.0;
    for j in 0..n {
        let hv: f64 = (0..n).map(|i| v[i] * h_n[(i, j)]).sum();
        gap = gap.max((psi[j] + eps * hv).abs());
    }
    r.push(Check::below("embedding_match", gap, s.tol));

    // ∫_{e_i^*} ι(∂y_j) Im Ω_n = h_n(e_i^*, ∂y_j)
    let class = metric_class(beta, order, y, res)?;
    r.push(Check::below("metric_class", (&class - &h_n * eps).abs().max(), s.tol));
    Ok(r)
}

/// Periods `C_ij = ∫_{e_i^*} ι(∂y_j) Im Ω_n` extracting the metric class of `Im Ω_n`.
pub fn metric_class(beta: &BetaStructure, order: PairingOrder, y: &[f64], res: usize) -> Result<DMatrix<f64>, DualityError> {
    let n = beta.n();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut hat = vec![0.0; n];
        hat[i] = order.sign(n, i);
        let psi = period_covector(beta, &hat, y, res)?;
        for j in 0..n {
            c[(i, j)] = -psi[j];
        }
    }
    Ok(c)
}

/// The class of the dual symplectic form read off along the re-embedded
/// lattice, `A_ij = ∫_{γ_i} ι(∂y_j) ω̌`, against the periods of `Im Ω_n`.
pub fn dual_symplectic_class_gap(beta: &BetaStructure, y: &[f64], res: usize) -> Result<f64, DualityError> {
    let n = beta.n();
    let omega_dual = Form::standard_symplectic(n);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut hat = vec![0.0; n];
        hat[i] = 1.0;
        let psi = period_covector(beta, &hat, y, res)?;
        for j in 0..n {
            let one_form = omega_dual.interior_y(j);
            // straight segment 0 → ψ in the dual fibre; the integrand is constant
            let mut line = 0.0;
            for k in 0..n {
                line += one_form.coefficient(0, 1 << k).re.eval(&Point::default()) * psi[k];
            }
            let periods = -psi[j];
            worst = worst.max((line - periods).abs());
        }
    }
    Ok(worst)
}

/// `Σ α_ij dy_i ⊗ dy_j` with base-only entries.
#[derive(Clone, Debug)]
pub struct SymTensorField {
    entries: SymMatrix,
}

impl SymTensorField {
    pub fn new(entries: SymMatrix) -> Result<Self, DualityError> {
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.depends_on_fibre() {
                    return Err(DualityError::FibreDependentTensor(i, j));
                }
            }
        }
        Ok(SymTensorField { entries })
    }

    pub fn entries(&self) -> &SymMatrix {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// `D_ij = α_ji − α_ij`.
    pub fn defect(&self) -> SymMatrix {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| &self.entries[j][i] - &self.entries[i][j]).collect()).collect()
    }

    /// `Σ_{i<j} (α_ij − α_ji) dy_i ∧ dy_j`, the image under `∧(−ω)`.
    pub fn wedge_minus_omega(&self) -> Form {
        let n = self.n();
        let mut f = Form::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                let c = &self.entries[i][j] - &self.entries[j][i];
                f = f.add(&Form::term(n, &[i, j], &[], CExpr::real(c)));
            }
        }
        f
    }

    pub fn defect_norm(&self, chart: &Chart, grid: &SampleGrid) -> f64 {
        self.defect().iter().flatten().map(|e| sup_abs_real(e, chart, grid)).fold(0.0, f64::max)
    }

    /// Symmetric representative `α_ij + ∂β_j/∂y_i`, with `β` solving
    /// `∂_iβ_j − ∂_jβ_i = α_ji − α_ij` by integration from the box center.
    pub fn symmetrize(&self, chart: &Chart) -> Result<SymTensorField, DualityError> {
        let n = self.n();
        let beta = self.gauge_potential(chart)?;
        let entries = (0..n)
            .map(|i| (0..n).map(|j| (&self.entries[i][j] + &beta[j].diff(Var::Y(i))).to_poly_expr()).collect())
            .collect();
        SymTensorField::new(entries)
    }

    /// The one-form `β = Σ β_j dy_j` used by [`symmetrize`](Self::symmetrize), with `β_1 = 0`.
    pub fn gauge_potential(&self, chart: &Chart) -> Result<Vec<ScalarExpr>, DualityError> {
        let n = self.n();
        let center: Vec<BigRational> =
            chart.center().iter().map(|&c| BigRational::from_f64(c).expect("finite center")).collect();
        let mut f = vec![vec![Poly::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                f[i][j] = self.entries[j][i]
                    .to_poly()
                    .zip(self.entries[i][j].to_poly())
                    .map(|(a, b)| a.sub(&b))
                    .ok_or(DualityError::NotPolynomial(i, j))?;
            }
        }
        if n == 3 {
            let d = f[1][2].diff(Var::Y(0)).sub(&f[0][2].diff(Var::Y(1))).add(&f[0][1].diff(Var::Y(2)));
            if !d.is_zero() {
                return Err(DualityError::NotCocycle);
            }
        }
        let mut beta = vec![ScalarExpr::zero(); n];
        if n >= 2 {
            beta[1] = f[0][1].integral_from(Var::Y(0), &center[0]).to_expr();
        }
        if n == 3 {
            let first = f[0][2].integral_from(Var::Y(0), &center[0]);
            let second = f[1][2].at(Var::Y(0), &center[0]).integral_from(Var::Y(1), &center[1]);
            beta[2] = first.add(&second).to_expr();
        }
        Ok(beta)
    }
}

trait PolyNormalize {
    fn to_poly_expr(&self) -> ScalarExpr;
}

impl PolyNormalize for ScalarExpr {
    fn to_poly_expr(&self) -> ScalarExpr {
        self.to_poly().map(|p| p.to_expr()).unwrap_or_else(|| self.clone())
    }
}

/// A potential `φ(y)` in action coordinates with its symbolic Hessian.
#[derive(Clone, Debug)]
pub struct HitchinPotential {
    phi: ScalarExpr,
    hessian: SymMatrix,
}

impl HitchinPotential {
    pub fn new(phi: ScalarExpr, chart: &Chart, grid: &SampleGrid) -> Result<Self, DualityError> {
        if phi.depends_on_fibre() {
            return Err(DualityError::FibreDependentTensor(0, 0));
        }
        let n = chart.n();
        let hessian: SymMatrix =
            (0..n).map(|i| (0..n).map(|j| phi.diff(Var::Y(i)).diff(Var::Y(j))).collect()).collect();
        let pts = grid.points_for(chart, matrix::deps(&hessian));
        let (neg, _) = max_over(&pts, |p| -SymmetricEigen::new(matrix::eval(&hessian, p)).eigenvalues.min());
        if !(-neg > 1e-9) {
            return Err(DualityError::HessianNotPositive(-neg));
        }
        Ok(HitchinPotential { phi, hessian })
    }

    pub fn phi(&self) -> &ScalarExpr {
        &self.phi
    }

    pub fn hessian(&self) -> &SymMatrix {
        &self.hessian
    }

    /// `sup |det Hess φ − det Hess φ(center)|`.
    pub fn det_variation(&self, chart: &Chart, grid: &SampleGrid) -> f64 {
        let det = matrix::det(&self.hessian);
        let c = det.eval(&Point::new(&chart.center(), &[]));
        sup_abs_real(&(det - ScalarExpr::float(c)), chart, grid)
    }
}

/// `β̌ = b + i Hess φ`.
pub fn hitchin(potential: &HitchinPotential, chart: &Chart, b: Option<&SymTensorField>) -> Result<BetaStructure, DualityError> {
    let n = chart.n();
    let zero: SymMatrix = vec![vec![ScalarExpr::zero(); n]; n];
    let b = match b {
        Some(t) => {
            let e = t.entries();
            for i in 0..n {
                for j in 0..n {
                    if (&e[i][j] - &e[j][i]).to_poly().map_or(true, |p| !p.is_zero()) {
                        return Err(DualityError::AsymmetricBField);
                    }
                }
            }
            e.clone()
        }
        None => zero,
    };
    Ok(BetaStructure::from_parts(chart.clone(), &b, potential.hessian())?)
}

fn fibre_constant_metric(beta: &BetaStructure) -> Result<(), DualityError> {
    if beta.g_inv().iter().flatten().any(|e| e.depends_on_fibre()) {
        return Err(DualityError::FibreDependentMetric);
    }
    Ok(())
}

/// Dual structure `β̌ = i h_n` on the fibres `T*_b B / Λ̌`, with `Λ̌`
/// spanned by the periods of the basis cycles.
pub fn dual_structure_check(beta: &BetaStructure, s: &CheckSettings, res: usize) -> Result<SemiflatReport, DualityError> {
    fibre_constant_metric(beta)?;
    let n = beta.n();
    let chart = beta.chart();
    let metrics = mclean_metrics(beta, s)?;
    // h_n is fibre-independent here, so Im β̌ has the closed form V g^{ij} / V
    let dual = BetaStructure::from_parts(chart.clone(), &vec![vec![ScalarExpr::zero(); n]; n], beta.g_inv())?;

    let mut h_gap: f64 = 0.0;
    let mut vol_gap: f64 = 0.0;
    for yv in chart.base_samples(s.grid.base_per_axis) {
        let y = &yv[..n];
        let h_n = metrics.h_n.at(chart, y, res)?;
        let vol = metrics.vol_at(chart, y, res)?;
        let lattice = LatticeTorus::new(h_n.clone());
        let p = Point::new(y, &[]);
        let v_dual = dual.v().eval(&p);
        let g_dual = matrix::eval(dual.g_inv(), &p);
        let vol_dual = lattice.integrate(|_| v_dual, res);
        let mut h_dual = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let gij = g_dual[(i, j)];
                h_dual[(i, j)] = lattice.integrate(|_| v_dual * gij, res) / vol_dual;
            }
        }
        h_gap = h_gap.max((&h_dual - &h_n).abs().max());
        vol_gap = vol_gap.max((vol * vol_dual - 1.0).abs());
    }
    let mut r = SemiflatReport::default();
    r.push(Check::below("dual_metric", h_gap, s.tol));
    r.push(Check::below("volume_reciprocity", vol_gap, 1e-10));
    Ok(r)
}

/// Yukawa coupling `∫ V² Σ_σ det(∂β̌_ij / ∂b_{σ(i)})` over chart × fibre,
/// oriented by `ω̌^n / n!`.
///
/// `directions[k]` gives the `k`-th derivative direction in parameter space;
/// `None` uses the coordinate directions.
pub fn yukawa(
    family: &[Vec<CExpr>],
    chart: &Chart,
    directions: Option<&[Vec<f64>]>,
    s: &CheckSettings,
    res: usize,
) -> Result<Complex64, DualityError> {
    let n = chart.n();
    if family.len() != n || family.iter().any(|r| r.len() != n) {
        return Err(SemiflatError::Shape(n).into());
    }
    let identity: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|l| if k == l { 1.0 } else { 0.0 }).collect()).collect();
    let dirs = directions.unwrap_or(&identity);
    if dirs.len() != n || dirs.iter().any(|d| d.len() != n) {
        return Err(DualityError::BadDirections { expected: n });
    }
    // first parameter derivatives must be parameter-free
    let mut partials = vec![vec![vec![CExpr::zero(); n]; n]; n];
    for (i, row) in family.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            for (l, slot) in partials.iter_mut().enumerate() {
                let d = e.diff(Var::B(l));
                if d.re.depends_on_params() || d.im.depends_on_params() {
                    return Err(DualityError::NonAffineFamily(i, j));
                }
                slot[i][j] = d;
            }
        }
    }
    let at_zero: Vec<Vec<CExpr>> = family
        .iter()
        .map(|r| r.iter().map(|e| e.substitute(&|v| matches!(v, Var::B(_)).then(ScalarExpr::zero))).collect())
        .collect();
    let base = BetaStructure::new(chart.clone(), at_zero)?;
    base.ensure_compatible(s)?;
    let v = base.v().clone();
    let perms = permutations(n);
    let integrand = |p: &Point| -> Complex64 {
        // derivative matrices along each direction
        let raw: Vec<Vec<Vec<Complex64>>> =
            partials.iter().map(|m| m.iter().map(|r| r.iter().map(|e| e.eval(p)).collect()).collect()).collect();
        let along: Vec<Vec<Vec<Complex64>>> = dirs
            .iter()
            .map(|d| {
                (0..n)
                    .map(|i| (0..n).map(|j| (0..n).map(|l| raw[l][i][j] * d[l]).sum()).collect())
                    .collect()
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for sigma in &perms {
            let m: Vec<Vec<Complex64>> = (0..n).map(|i| along[sigma[i]][i].clone()).collect();
            total += complex_det(&m);
        }
        let vv = v.eval(p);
        total * vv * vv
    };
    let value = integrate(&integrand, chart, &Domain::Total, res)?;
    let orientation = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(value * orientation)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn complex_det(m: &[Vec<Complex64>]) -> Complex64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<Complex64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect()).collect();
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                m[0][j] * complex_det(&minor) * s
            })
            .sum(),
    }
}
