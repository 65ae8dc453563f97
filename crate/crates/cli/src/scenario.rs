//! Versioned scenario files. Unknown fields are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};
use syzlab_core::chart_calculus::ComplexText;
use syzlab_core::duality::{CycleSpec, PairingOrder};
use syzlab_lattice::k3::K3InputSpec;
use syzlab_lattice::leray::E2Table;
use syzlab_lattice::models::CollapseRule;
use syzlab_lattice::sheaf::MonodromySpec;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Numeric settings shared by all scenario kinds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Quadrature nodes per fibre axis.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_grid() -> usize {
    16
}

fn default_tol() -> f64 {
    1e-8
}

impl Default for Settings {
    fn default() -> Self {
        Self { grid: default_grid(), tol: default_tol(), seed: 0 }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid == 0 {
            return Err(CliError::Schema("grid must be positive".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Schema(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Overrides from the command line; `None` keeps the scenario value.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, s: Settings) -> Settings {
        Settings {
            grid: self.grid.unwrap_or(s.grid),
            tol: self.tol.unwrap_or(s.tol),
            seed: self.seed.unwrap_or(s.seed),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub settings: Settings,
    pub task: Task,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    SemiflatCheck(StructurePayload),
    Dualize(DualizePayload),
    Hitchin(HitchinPayload),
    Yukawa(YukawaPayload),
    Fibre(FibrePayload),
    Sheaf(SheafPayload),
    K3(K3InputSpec),
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::SemiflatCheck(_) => "semiflat-check",
            Self::Dualize(_) => "dualize",
            Self::Hitchin(_) => "hitchin",
            Self::Yukawa(_) => "yukawa",
            Self::Fibre(_) => "fibre",
            Self::Sheaf(_) => "sheaf",
            Self::K3(_) => "k3",
        }
    }
}

/// Base box as `[lo, hi]` per axis and the matrix `beta` as complex expressions.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructurePayload {
    pub chart: Vec<[f64; 2]>,
    pub beta: Vec<Vec<ComplexText>>,
}

/// One term `c dy_J ^ dx_I` of a form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTerm {
    #[serde(default)]
    pub dy: Vec<usize>,
    #[serde(default)]
    pub dx: Vec<usize>,
    pub coeff: ComplexText,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualizePayload {
    pub chart: Vec<[f64; 2]>,
    pub beta: Vec<Vec<ComplexText>>,
    pub cycles: Vec<CycleSpec>,
    /// Test form paired against the cycles; defaults to `dx_1 ^ ... ^ dx_{n-1}`.
    #[serde(default)]
    pub alpha: Vec<FormTerm>,
    #[serde(default)]
    pub order: PairingOrder,
    /// Also build the dual structure (needs a fibre-constant metric).
    #[serde(default = "yes")]
    pub dual: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HitchinPayload {
    pub chart: Vec<[f64; 2]>,
    pub phi: String,
    /// Base function f; twists by B = Hess f and compares with translation by df.
    #[serde(default)]
    pub twist: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YukawaPayload {
    pub chart: Vec<[f64; 2]>,
    /// Family of beta matrices, affine in the parameters b1..bn.
    pub family: Vec<Vec<ComplexText>>,
    #[serde(default)]
    pub directions: Option<Vec<Vec<f64>>>,
    /// Expected value as `[re, im]`.
    #[serde(default)]
    pub expected: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrePayload {
    /// A catalogue name, or "custom" together with `rules`.
    pub model: String,
    #[serde(default)]
    pub rules: Option<Vec<CollapseRule>>,
    #[serde(default = "one")]
    pub subdivision: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablePair {
    pub table: E2Table,
    pub dual: E2Table,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafPayload {
    #[serde(default)]
    pub system: Option<MonodromySpec>,
    /// Expected `(h0, h1, h2)`.
    #[serde(default)]
    pub expected: Option<[usize; 3]>,
    #[serde(default)]
    pub tables: Option<TablePair>,
}

impl Scenario {
    pub fn new(name: impl Into<String>, settings: Settings, task: Task) -> Self {
        Self { version: SCHEMA_VERSION, name: name.into(), settings, task }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = serde_json::from_str(text)?;
        if s.version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!("unsupported version {}, expected {SCHEMA_VERSION}", s.version)));
        }
        s.settings.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?)
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}
