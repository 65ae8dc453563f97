//! Static listings: the fibre model catalogue and the convention ledger.

use std::fmt::Write as _;

use serde::Serialize;
use syzlab_core::conventions;
use syzlab_lattice::models::SINGULAR_MODELS;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelRow {
    pub name: &'static str,
    pub b1: usize,
    pub b2: usize,
    pub description: &'static str,
}

/// The eight singular fibre models, optionally restricted to one type (b1, b2).
pub fn list_models(filter: Option<(usize, usize)>) -> Vec<ModelRow> {
    SINGULAR_MODELS
        .iter()
        .filter_map(|m| {
            let (b1, b2) = m.expected_type()?;
            Some(ModelRow { name: m.name(), b1, b2, description: m.description() })
        })
        .filter(|r| filter.is_none_or(|t| (r.b1, r.b2) == t))
        .collect()
}

pub fn models_text(rows: &[ModelRow]) -> String {
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
    let mut s = format!("{:<w$}  (b1,b2)  description\n", "model");
    for r in rows {
        let _ = writeln!(s, "{:<w$}  ({},{})    {}", r.name, r.b1, r.b2, r.description);
    }
    s
}

pub fn conventions_text() -> String {
    let ledger = conventions::ledger();
    let w = ledger.iter().map(|c| c.topic.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in ledger {
        let _ = writeln!(s, "{:<w$}  {}", c.topic, c.statement);
    }
    s
}

pub fn conventions_json() -> String {
    serde_json::to_string_pretty(conventions::ledger()).expect("ledger serializes")
}

/// Parses a type filter written "1,1" or "(1,1)".
pub fn parse_type(s: &str) -> Result<(usize, usize), String> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let (a, b) = t.split_once(',').ok_or_else(|| format!("expected b1,b2, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}
