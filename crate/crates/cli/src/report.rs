use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};
use syzlab_core::{Check, Relation};

use crate::error::CliError;
use crate::scenario::{Overrides, Scenario};
use crate::tasks::run_task;

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    /// The scenario as run, with command-line overrides applied.
    pub scenario: Scenario,
    pub checks: Vec<Check>,
    pub details: Map<String, Value>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub timings: Timings,
}

impl RunReport {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the timing block; identical across runs of the same scenario.
    pub fn to_stable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let title = if self.scenario.name.is_empty() { self.scenario.task.kind() } else { &self.scenario.name };
        let _ = writeln!(s, "{title} [{}]", self.scenario.task.kind());
        let rows: Vec<[String; 4]> = self
            .checks
            .iter()
            .map(|c| {
                let (rel, thr) = match c.relation {
                    Relation::Below => ("<", format!("{:.3e}", c.threshold)),
                    Relation::Above => (">", format!("{:.3e}", c.threshold)),
                    Relation::Info => ("", String::new()),
                };
                let verdict = match c.relation {
                    Relation::Info => "info",
                    _ if c.pass => "pass",
                    _ => "FAIL",
                };
                [c.name.clone(), format!("{:.6e}", c.value), format!("{rel} {thr}").trim().to_string(), verdict.into()]
            })
            .collect();
        let header = ["check", "value", "threshold", "verdict"].map(String::from);
        let mut widths = header.clone().map(|h| h.len());
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.len());
            }
        }
        for r in std::iter::once(&header).chain(&rows) {
            let _ = writeln!(
                s,
                "  {:<w0$}  {:>w1$}  {:<w2$}  {}",
                r[0],
                r[1],
                r[2],
                r[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2]
            );
        }
        for (k, v) in &self.details {
            let _ = writeln!(s, "  {k}: {v}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        let _ = writeln!(s, "verdict: {}", if self.passed { "pass" } else { "fail" });
        s
    }
}

/// Worker threads from `SYZLAB_THREADS`, when set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SYZLAB_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn run_scenario(scenario: &Scenario, overrides: &Overrides) -> Result<RunReport, CliError> {
    let mut scenario = scenario.clone();
    scenario.settings = overrides.apply(scenario.settings);
    scenario.settings.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Internal(e.to_string()))?;
    let start = Instant::now();
    let outcome = pool.install(|| run_task(&scenario.task, &scenario.settings))?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let passed = outcome.checks.iter().all(|c| c.pass);
    Ok(RunReport {
        tool: "syzlab",
        version: env!("CARGO_PKG_VERSION"),
        scenario,
        checks: outcome.checks,
        details: outcome.details,
        notes: outcome.notes,
        passed,
        timings: Timings { total_ms },
    })
}
