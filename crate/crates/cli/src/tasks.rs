//! Dispatch from scenario payloads to the library operations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use syzlab_core::chart_calculus::{parse_expr, sup_abs, CExpr, Chart, Form, SampleGrid, ScalarExpr, Var};
use syzlab_core::duality::{
    dual_structure_check, dual_symplectic_class_gap, duality_identities, hitchin, yukawa, HitchinPotential,
    SymTensorField,
};
use syzlab_core::semiflat::{BetaStructure, CheckSettings};
use syzlab_core::{Check, SemiflatReport};
use syzlab_lattice::cells::integral_cohomology;
use syzlab_lattice::k3::{double_mirror_check, mirror_classes, render_class, validate_and_align, K3InputSpec};
use syzlab_lattice::leray::{duality_checks, E2Table};
use syzlab_lattice::models::{build_model_subdivided, QuotientModel};
use syzlab_lattice::sheaf::{euler_characteristic, pushforward_cohomology, LocalSystemOnSphere};
use syzlab_lattice::snf::{AbelianGroup, IntMatrix};

use crate::error::CliError;
use crate::scenario::{
    DualizePayload, FibrePayload, FormTerm, HitchinPayload, Settings, SheafPayload, StructurePayload, Task,
    YukawaPayload,
};

/// Checks and structured results of one task.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub details: Map<String, Value>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn absorb(&mut self, prefix: &str, r: SemiflatReport) {
        for mut c in r.checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}.{}", c.name);
            }
            self.checks.push(c);
        }
        self.notes.extend(r.notes);
    }

    fn detail(&mut self, key: &str, v: Value) {
        self.details.insert(key.to_string(), v);
    }
}

pub fn run_task(task: &Task, settings: &Settings) -> Result<Outcome, CliError> {
    match task {
        Task::SemiflatCheck(p) => semiflat_check(p, settings),
        Task::Dualize(p) => dualize(p, settings),
        Task::Hitchin(p) => run_hitchin(p, settings),
        Task::Yukawa(p) => run_yukawa(p, settings),
        Task::Fibre(p) => fibre(p),
        Task::Sheaf(p) => sheaf(p, settings),
        Task::K3(p) => k3(p),
    }
}

fn check_settings(s: &Settings) -> CheckSettings {
    CheckSettings { tol: s.tol, ..CheckSettings::default() }
}

fn chart(bounds: &[[f64; 2]]) -> Result<Chart, CliError> {
    let b: Vec<(f64, f64)> = bounds.iter().map(|[lo, hi]| (*lo, *hi)).collect();
    Ok(Chart::new(&b)?)
}

fn parse(src: &str) -> Result<ScalarExpr, CliError> {
    Ok(parse_expr(src)?)
}

fn structure(bounds: &[[f64; 2]], beta: &[Vec<syzlab_core::chart_calculus::ComplexText>]) -> Result<BetaStructure, CliError> {
    let chart = chart(bounds)?;
    let beta = beta
        .iter()
        .map(|row| row.iter().map(|c| c.parse()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BetaStructure::new(chart, beta)?)
}

fn semiflat_check(p: &StructurePayload, settings: &Settings) -> Result<Outcome, CliError> {
    let beta = structure(&p.chart, &p.beta)?;
    let s = check_settings(settings);
    let mut out = Outcome::default();
    out.absorb("", beta.pointwise_checks(None, &s));
    out.absorb("", beta.closedness_residuals(&s)?);
    out.absorb("structure", beta.structure_equations(&s)?);
    out.detail("n", json!(beta.n()));
    Ok(out)
}

fn form(n: usize, terms: &[FormTerm]) -> Result<Form, CliError> {
    if terms.is_empty() {
        let xs: Vec<usize> = (0..n - 1).collect();
        return Ok(Form::term(n, &[], &xs, CExpr::one()));
    }
    let mut f = Form::zero(n);
    for t in terms {
        if t.dy.iter().chain(&t.dx).any(|&i| i >= n) {
            return Err(CliError::Input(format!("form index out of range for n = {n}")));
        }
        f = f.add(&Form::term(n, &t.dy, &t.dx, t.coeff.parse()?));
    }
    Ok(f)
}

fn dualize(p: &DualizePayload, settings: &Settings) -> Result<Outcome, CliError> {
    let beta = structure(&p.chart, &p.beta)?;
    let s = check_settings(settings);
    let alpha = form(beta.n(), &p.alpha)?;
    let reports: Vec<SemiflatReport> = p
        .cycles
        .par_iter()
        .map(|c| duality_identities(&beta, c, &alpha, p.order, &s, settings.grid))
        .collect::<Result<_, _>>()?;
    let mut out = Outcome::default();
    for (k, r) in reports.into_iter().enumerate() {
        out.absorb(&format!("cycle{k}"), r);
    }
    if p.dual {
        out.absorb("dual", dual_structure_check(&beta, &s, settings.grid)?);
        let gap = dual_symplectic_class_gap(&beta, &beta.chart().center(), settings.grid)?;
        out.checks.push(Check::below("dual.symplectic_class", gap, s.tol));
    }
    Ok(out)
}

fn run_hitchin(p: &HitchinPayload, settings: &Settings) -> Result<Outcome, CliError> {
    let chart = chart(&p.chart)?;
    let s = check_settings(settings);
    let grid = SampleGrid::default();
    let pot = HitchinPotential::new(parse(&p.phi)?, &chart, &grid)?;
    let plain = hitchin(&pot, &chart, None)?;
    let mut out = Outcome::default();
    out.checks.push(Check::info("hessian_det_variation", pot.det_variation(&chart, &grid)));
    out.absorb("", plain.closedness_residuals(&s)?);
    if let Some(f) = &p.twist {
        let f = parse(f)?;
        let n = chart.n();
        let b: Vec<Vec<ScalarExpr>> =
            (0..n).map(|i| (0..n).map(|j| f.diff(Var::Y(i)).diff(Var::Y(j))).collect()).collect();
        let twisted = hitchin(&pot, &chart, Some(&SymTensorField::new(b)?))?;
        let sigma: Vec<ScalarExpr> = (0..n).map(|i| f.diff(Var::Y(i))).collect();
        let moved = plain.translate_by_section(&sigma)?;
        let mut gap: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                gap = gap.max(sup_abs(&(&twisted.beta()[i][j] - &moved.beta()[i][j]), &chart, &grid));
            }
        }
        out.checks.push(Check::below("twist_matches_translation", gap, 1e-10));
        out.absorb("twisted", twisted.closedness_residuals(&s)?);
    }
    Ok(out)
}

fn run_yukawa(p: &YukawaPayload, settings: &Settings) -> Result<Outcome, CliError> {
    let chart = chart(&p.chart)?;
    let s = check_settings(settings);
    let family = p
        .family
        .iter()
        .map(|row| row.iter().map(|c| c.parse()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let v = yukawa(&family, &chart, p.directions.as_deref(), &s, settings.grid)?;
    let mut out = Outcome::default();
    out.checks.push(Check::info("yukawa_re", v.re));
    out.checks.push(Check::info("yukawa_im", v.im));
    if let Some([re, im]) = p.expected {
        let want = num_complex::Complex64::new(re, im);
        let rel = (v - want).norm() / want.norm().max(f64::MIN_POSITIVE);
        out.checks.push(Check::below("relative_error", rel, s.tol));
    }
    Ok(out)
}

fn group_json(g: &AbelianGroup) -> Value {
    json!({ "rank": g.rank, "torsion": g.torsion, "group": g.to_string() })
}

fn fibre(p: &FibrePayload) -> Result<Outcome, CliError> {
    let model = match (&p.rules, p.model.eq_ignore_ascii_case("custom")) {
        (Some(rules), true) => QuotientModel::Custom { rules: rules.clone() },
        (None, true) => return Err(CliError::Input("custom model needs rules".into())),
        (Some(_), false) => return Err(CliError::Input("rules are only accepted with model \"custom\"".into())),
        (None, false) => p.model.parse()?,
    };
    let cx = build_model_subdivided(&model, p.subdivision)?;
    let coh = integral_cohomology(&cx)?;
    let mut out = Outcome::default();
    out.checks.push(Check::holds("boundary_squared_zero", cx.boundary_squared_defect()?.is_none()));
    out.checks.push(Check::holds("euler_characteristic", coh.euler_characteristic() == cx.euler_characteristic()));
    let betti = coh.betti();
    if let Some((b1, b2)) = model.expected_type() {
        out.checks.push(Check::holds("type", (betti[1], betti[2]) == (b1, b2)));
        out.detail("expected_type", json!([b1, b2]));
    }
    out.detail("model", json!(model.name()));
    out.detail("cells", json!(cx.cell_counts()));
    out.detail("betti", json!(betti));
    out.detail("cohomology", Value::Array(coh.degrees.iter().map(group_json).collect()));
    Ok(out)
}

/// A random unimodular matrix as a product of elementary ones.
fn random_unimodular(rng: &mut ChaCha8Rng, r: usize) -> IntMatrix {
    let mut g = IntMatrix::identity(r);
    if r == 1 {
        g.set(0, 0, if rng.gen_bool(0.5) { 1 } else { -1 });
        return g;
    }
    for _ in 0..4 {
        let i = rng.gen_range(0..r);
        let j = (i + rng.gen_range(1..r)) % r;
        let mut e = IntMatrix::identity(r);
        e.set(i, j, if rng.gen_bool(0.5) { 1 } else { -1 });
        g = g.mul(&e).expect("small entries");
    }
    g
}

fn sheaf(p: &SheafPayload, settings: &Settings) -> Result<Outcome, CliError> {
    if p.system.is_none() && p.tables.is_none() {
        return Err(CliError::Input("sheaf payload needs a system or a table pair".into()));
    }
    let mut out = Outcome::default();
    if let Some(spec) = &p.system {
        let ls = LocalSystemOnSphere::from_spec(spec)?;
        let coh = pushforward_cohomology(&ls)?;
        let ranks = coh.ranks();
        out.checks.push(Check::holds("euler_characteristic", coh.euler_characteristic() == euler_characteristic(&ls)?));
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        let g = random_unimodular(&mut rng, ls.rank());
        let moved = pushforward_cohomology(&ls.conjugate(&g)?)?;
        out.checks.push(Check::holds("conjugation_invariance", moved == coh));
        if let Some(want) = p.expected {
            out.checks.push(Check::holds("expected_ranks", [ranks.0, ranks.1, ranks.2] == want));
        }
        out.detail("ranks", json!([ranks.0, ranks.1, ranks.2]));
        out.detail("cohomology", Value::Array(coh.groups.iter().map(group_json).collect()));
        out.detail("euler_characteristic", json!(coh.euler_characteristic()));
        if ls.rank() == 2 {
            out.detail("e2", serde_json::to_value(E2Table::k3(&ls)?)?);
        }
    }
    if let Some(pair) = &p.tables {
        let report = duality_checks(&pair.table, &pair.dual);
        for r in &report.relations {
            out.checks.push(Check::holds(&format!("torsion.{}", r.name), r.passed));
            if !r.passed {
                out.notes.push(format!("{}: {}", r.name, r.detail));
            }
        }
    }
    Ok(out)
}

fn k3(spec: &K3InputSpec) -> Result<Outcome, CliError> {
    let input = spec.to_input()?;
    let aligned = validate_and_align(&input)?;
    let m = mirror_classes(&aligned.input)?;
    let double = double_mirror_check(&input)?;
    let mut out = Outcome::default();
    let mut values = Map::new();
    for c in &m.checks {
        out.checks.push(Check::holds(c.name, c.passed));
        values.insert(c.name.to_string(), json!(c.value));
    }
    for c in &double.checks {
        out.checks.push(Check::holds(&format!("double_mirror.{}", c.name), c.passed));
    }
    out.detail("volume", json!(m.volume.to_string()));
    out.detail("mirror_volume", json!(m.mirror_volume.to_string()));
    out.detail("phase", json!([aligned.phase.0.to_string(), aligned.phase.1.to_string()]));
    out.detail(
        "mirror",
        json!({
            "omega": render_class(&m.omega),
            "omega_n_re": render_class(&m.omega_n.0),
            "omega_n_im": render_class(&m.omega_n.1),
            "re_omega": render_class(&m.re_omega),
            "im_omega": render_class(&m.im_omega),
            "b_field": render_class(&m.b_field),
        }),
    );
    out.detail("check_values", Value::Object(values));
    Ok(out)
}
