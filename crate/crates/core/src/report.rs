use serde::Serialize;

/// How a check's value is compared with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Below,
    Above,
    Info,
}

/// One named residual with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    /// Passes when `value < threshold` (NaN never passes).
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, relation: Relation::Below, pass: value < threshold }
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, relation: Relation::Above, pass: value > threshold }
    }

    pub fn info(name: &str, value: f64) -> Self {
        Check { name: name.into(), value, threshold: f64::NAN, relation: Relation::Info, pass: true }
    }

    /// A boolean assertion, stored as value 1 (holds) or 0.
    pub fn holds(name: &str, ok: bool) -> Self {
        Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, threshold: 0.5, relation: Relation::Above, pass: ok }
    }
}

/// Named residuals and verdicts from a structure check.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SemiflatReport {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl SemiflatReport {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Value of a named check; panics on unknown names.
    pub fn value(&self, name: &str) -> f64 {
        self.get(name).unwrap_or_else(|| panic!("no check named {name}")).value
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn extend(&mut self, other: SemiflatReport) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }
}
