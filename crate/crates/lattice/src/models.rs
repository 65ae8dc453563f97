//! Singular three-torus fibre models as collapse quotients of a cubical torus.
//!
//! The torus T^n is the product of n circles, each with `m` vertices and `m` edges.
//! A quotient is described by [`CollapseRule`]s: a rule names the coordinate
//! hyperplanes x_a = 0 whose union it acts on, and the axes whose coordinates
//! survive; every other coordinate is sent to 0. With m = 1 these are the minimal
//! cell structures; m = 2 is one round of subdivision.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::{circle, integral_cohomology, CellComplex, CohomologyResult, ComplexError};
use crate::snf::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("non-cellular identification: {0}")]
    NonCellular(String),
    #[error("axis {axis} out of range for a {dim}-torus")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("subdivision must be at least 1")]
    Subdivision,
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("missing model {0}")]
    MissingModel(QuotientModel),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseRule {
    /// Axes a whose hyperplanes x_a = 0 form the collapsed set.
    pub locus: Vec<usize>,
    /// Axes whose coordinates are preserved by the collapse.
    pub keep: Vec<usize>,
}

impl CollapseRule {
    pub fn new(locus: &[usize], keep: &[usize]) -> Self {
        Self { locus: locus.to_vec(), keep: keep.to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuotientModel {
    T3,
    /// I_1 x S^1.
    M22,
    /// S^1 x T^2 with a point times T^2 collapsed.
    M12,
    /// Singular along a figure eight.
    M21,
    /// II x S^1.
    M11a,
    /// The figure-eight model with one loop contracted.
    M11b,
    M01,
    M10,
    /// Boundary of the cube collapsed: a sphere.
    M00,
    Custom { rules: Vec<CollapseRule> },
}

/// The eight singular models, in catalogue order.
pub const SINGULAR_MODELS: [QuotientModel; 8] = [
    QuotientModel::M22,
    QuotientModel::M12,
    QuotientModel::M21,
    QuotientModel::M11a,
    QuotientModel::M11b,
    QuotientModel::M01,
    QuotientModel::M10,
    QuotientModel::M00,
];

impl QuotientModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::T3 => "T3",
            Self::M22 => "M22",
            Self::M12 => "M12",
            Self::M21 => "M21",
            Self::M11a => "M11a",
            Self::M11b => "M11b",
            Self::M01 => "M01",
            Self::M10 => "M10",
            Self::M00 => "M00",
            Self::Custom { .. } => "custom",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::T3 => "smooth three-torus",
            Self::M22 => "I_1 x S^1",
            Self::M12 => "S^1 x T^2 / pt x T^2",
            Self::M21 => "singular along a figure eight",
            Self::M11a => "II x S^1",
            Self::M11b => "figure-eight model with one loop contracted",
            Self::M01 => "figure eight of the (2,1) model contracted to a point",
            Self::M10 => "x3-circle family of contracted squares, x3 = 0 torus contracted",
            Self::M00 => "cube boundary contracted (three-sphere)",
            Self::Custom { .. } => "user collapse rules",
        }
    }

    /// Expected (b1, b2), where known.
    pub fn expected_type(&self) -> Option<(usize, usize)> {
        Some(match self {
            Self::T3 => (3, 3),
            Self::M22 => (2, 2),
            Self::M12 => (1, 2),
            Self::M21 => (2, 1),
            Self::M11a | Self::M11b => (1, 1),
            Self::M01 => (0, 1),
            Self::M10 => (1, 0),
            Self::M00 => (0, 0),
            Self::Custom { .. } => return None,
        })
    }

    /// Collapse rules on T^3 realizing the model (empty for T3).
    pub fn rules(&self) -> Vec<CollapseRule> {
        use CollapseRule as R;
        match self {
            Self::T3 => vec![],
            Self::M22 => vec![R::new(&[1], &[2])],
            Self::M12 => vec![R::new(&[0], &[])],
            Self::M21 => vec![R::new(&[0, 1], &[0, 1])],
            Self::M11a => vec![R::new(&[0, 1], &[2])],
            Self::M11b => vec![R::new(&[0], &[0, 1]), R::new(&[1], &[])],
            Self::M01 => vec![R::new(&[0, 1], &[])],
            Self::M10 => vec![R::new(&[0, 1], &[2]), R::new(&[2], &[])],
            Self::M00 => vec![R::new(&[0, 1, 2], &[])],
            Self::Custom { rules } => rules.clone(),
        }
    }
}

impl fmt::Display for QuotientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuotientModel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        std::iter::once(QuotientModel::T3)
            .chain(SINGULAR_MODELS)
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

/// A factor of a torus cell: vertex or edge `index` of a circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Factor {
    edge: bool,
    index: usize,
}

const ORIGIN: Factor = Factor { edge: false, index: 0 };

type TorusCell = Vec<Factor>;

fn cell_dim(c: &[Factor]) -> usize {
    c.iter().filter(|f| f.edge).count()
}

fn cell_label(c: &[Factor]) -> String {
    c.iter()
        .map(|f| format!("{}{}", if f.edge { 'e' } else { 'v' }, f.index))
        .collect::<Vec<_>>()
        .join(".")
}

/// Product-rule boundary of a torus cell as (coefficient, face) pairs.
fn torus_boundary(c: &[Factor], m: usize) -> Vec<(i128, TorusCell)> {
    let mut out = Vec::new();
    let mut preceding = 0;
    for (axis, f) in c.iter().enumerate() {
        if f.edge {
            let sign = if preceding % 2 == 0 { 1 } else { -1 };
            if m > 1 {
                let mut head = c.to_vec();
                head[axis] = Factor { edge: false, index: (f.index + 1) % m };
                let mut tail = c.to_vec();
                tail[axis] = Factor { edge: false, index: f.index };
                out.push((sign, head));
                out.push((-sign, tail));
            }
            preceding += 1;
        }
    }
    out
}

fn torus_cells(axes: usize, m: usize) -> Vec<Vec<TorusCell>> {
    let mut by_dim = vec![Vec::new(); axes + 1];
    let per_axis: Vec<Factor> = (0..m)
        .map(|i| Factor { edge: false, index: i })
        .chain((0..m).map(|i| Factor { edge: true, index: i }))
        .collect();
    let mut stack: Vec<TorusCell> = vec![Vec::new()];
    for _ in 0..axes {
        stack = stack
            .into_iter()
            .flat_map(|c| {
                per_axis.iter().map(move |f| {
                    let mut c = c.clone();
                    c.push(*f);
                    c
                })
            })
            .collect();
    }
    for c in stack {
        by_dim[cell_dim(&c)].push(c);
    }
    by_dim
}

fn assemble(
    cells: Vec<Vec<TorusCell>>,
    boundary_of: impl Fn(&TorusCell) -> Vec<(i128, TorusCell)>,
) -> Result<CellComplex, ModelError> {
    let index: Vec<HashMap<&TorusCell, usize>> =
        cells.iter().map(|cs| cs.iter().enumerate().map(|(i, c)| (c, i)).collect()).collect();
    let mut boundaries = Vec::new();
    for k in 1..cells.len() {
        let mut d = IntMatrix::zeros(cells[k - 1].len(), cells[k].len());
        for (col, c) in cells[k].iter().enumerate() {
            for (coef, face) in boundary_of(c) {
                let row = index[k - 1].get(&face).ok_or_else(|| {
                    ModelError::NonCellular(format!("face {} of {} is not a cell", cell_label(&face), cell_label(c)))
                })?;
                d.add_to(*row, col, coef);
            }
        }
        boundaries.push(d);
    }
    let labels = cells.iter().map(|cs| cs.iter().map(|c| cell_label(c)).collect()).collect();
    Ok(CellComplex::new(labels, boundaries)?)
}

/// The torus T^axes with `m` vertices per circle.
pub fn torus(axes: usize, m: usize) -> Result<CellComplex, ModelError> {
    if m == 0 {
        return Err(ModelError::Subdivision);
    }
    assemble(torus_cells(axes, m), |c| torus_boundary(c, m))
}

/// Pushout of T^axes along the collapse map described by `rules`.
pub fn collapse_quotient(axes: usize, m: usize, rules: &[CollapseRule]) -> Result<CellComplex, ModelError> {
    if m == 0 {
        return Err(ModelError::Subdivision);
    }
    for r in rules {
        for &axis in r.locus.iter().chain(&r.keep) {
            if axis >= axes {
                return Err(ModelError::AxisOutOfRange { axis, dim: axes });
            }
        }
    }
    let cells = torus_cells(axes, m);

    // The collapse map on the union of the loci.
    let mut image: BTreeMap<TorusCell, TorusCell> = BTreeMap::new();
    for c in cells.iter().flatten() {
        let mut target: Option<TorusCell> = None;
        for r in rules.iter().filter(|r| r.locus.iter().any(|&a| c[a] == ORIGIN)) {
            let mut t = c.clone();
            for (axis, f) in t.iter_mut().enumerate() {
                if !r.keep.contains(&axis) {
                    *f = ORIGIN;
                }
            }
            match &target {
                Some(prev) if *prev != t => {
                    return Err(ModelError::NonCellular(format!(
                        "cell {} has images {} and {}",
                        cell_label(c),
                        cell_label(prev),
                        cell_label(&t)
                    )));
                }
                _ => target = Some(t),
            }
        }
        if let Some(t) = target {
            image.insert(c.clone(), t);
        }
    }
    for (c, t) in &image {
        if image.get(t) != Some(t) {
            return Err(ModelError::NonCellular(format!(
                "image {} of {} is not fixed by the collapse",
                cell_label(t),
                cell_label(c)
            )));
        }
    }

    // Induced chain map on the collapsed subcomplex: a cell goes to its image when
    // the dimension is preserved, and to zero otherwise.
    let push = |chain: Vec<(i128, TorusCell)>| -> BTreeMap<TorusCell, i128> {
        let mut out = BTreeMap::new();
        for (coef, a) in chain {
            let target = match image.get(&a) {
                Some(t) if cell_dim(t) == cell_dim(&a) => t.clone(),
                Some(_) => continue,
                None => a,
            };
            *out.entry(target).or_insert(0) += coef;
        }
        out.retain(|_, v| *v != 0);
        out
    };
    for (c, t) in &image {
        let lhs = push(torus_boundary(c, m));
        let rhs = if cell_dim(t) == cell_dim(c) { push(torus_boundary(t, m)) } else { BTreeMap::new() };
        if lhs != rhs {
            return Err(ModelError::NonCellular(format!("collapse does not commute with the boundary at {}", cell_label(c))));
        }
    }

    let fixed: BTreeSet<&TorusCell> = image.values().collect();
    let kept: Vec<Vec<TorusCell>> = cells
        .into_iter()
        .map(|cs| cs.into_iter().filter(|c| !image.contains_key(c) || fixed.contains(c)).collect())
        .collect();
    assemble(kept, |c| push(torus_boundary(c, m)).into_iter().map(|(f, v)| (v, f)).collect())
}

/// Builds the model in its minimal cell structure.
pub fn build_model(model: &QuotientModel) -> Result<CellComplex, ModelError> {
    build_model_subdivided(model, 1)
}

/// Builds the model with `m` vertices per circle. Product models are assembled as
/// products of a two-dimensional quotient with a circle.
pub fn build_model_subdivided(model: &QuotientModel, m: usize) -> Result<CellComplex, ModelError> {
    match model {
        QuotientModel::M22 => {
            let i1 = collapse_quotient(2, m, &[CollapseRule::new(&[1], &[])])?;
            Ok(i1.product(&circle(m))?)
        }
        QuotientModel::M11a => {
            let cusp = collapse_quotient(2, m, &[CollapseRule::new(&[0, 1], &[])])?;
            Ok(cusp.product(&circle(m))?)
        }
        other => collapse_quotient(3, m, &other.rules()),
    }
}

pub fn model_cohomology(model: &QuotientModel, m: usize) -> Result<CohomologyResult, ModelError> {
    Ok(integral_cohomology(&build_model_subdivided(model, m)?)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct FibreRow {
    pub model: String,
    pub description: &'static str,
    pub b1: usize,
    pub b2: usize,
    pub expected: (usize, usize),
    pub matches: bool,
    pub cohomology: CohomologyResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingAudit {
    pub passed: bool,
    /// Types (m, n) present without a partner of type (n, m).
    pub unpaired: Vec<(usize, usize)>,
}

/// For every type (m, n) present, (n, m) must be present too.
pub fn pairing_audit(types: &[(usize, usize)]) -> PairingAudit {
    let present: BTreeSet<_> = types.iter().copied().collect();
    let unpaired: Vec<_> = present.iter().copied().filter(|&(a, b)| !present.contains(&(b, a))).collect();
    PairingAudit { passed: unpaired.is_empty(), unpaired }
}

#[derive(Clone, Debug, Serialize)]
pub struct FibreTypeReport {
    pub rows: Vec<FibreRow>,
    pub all_match: bool,
    pub pairing: PairingAudit,
}

impl FibreTypeReport {
    pub fn passed(&self) -> bool {
        self.all_match && self.pairing.passed
    }
}

pub fn fibre_type_report(results: &[(QuotientModel, CohomologyResult)]) -> Result<FibreTypeReport, ModelError> {
    for model in SINGULAR_MODELS {
        if !results.iter().any(|(m, _)| *m == model) {
            return Err(ModelError::MissingModel(model));
        }
    }
    let rows: Vec<FibreRow> = results
        .iter()
        .filter_map(|(model, coh)| {
            let expected = model.expected_type()?;
            let (b1, b2) = (coh.b(1), coh.b(2));
            Some(FibreRow {
                model: model.name().to_string(),
                description: model.description(),
                b1,
                b2,
                expected,
                matches: (b1, b2) == expected,
                cohomology: coh.clone(),
            })
        })
        .filter(|r| r.model != "T3")
        .collect();
    let types: Vec<_> = rows.iter().map(|r| (r.b1, r.b2)).collect();
    Ok(FibreTypeReport { all_match: rows.iter().all(|r| r.matches), pairing: pairing_audit(&types), rows })
}
