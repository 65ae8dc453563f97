//! Leray E2 tables H^i(B, R^j f_* Z) and the torsion-duality relations between a
//! three-dimensional fibration and its dual.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sheaf::{pushforward_cohomology, LocalSystemOnSphere, SheafError};
use crate::snf::{AbelianGroup, SnfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("entry ({i},{j}) is {found}, but the layout requires {required}")]
    Pattern { i: usize, j: usize, found: String, required: &'static str },
    #[error("rank of ({i1},{j1}) is {r1} but rank of ({i2},{j2}) is {r2}")]
    RankMismatch { i1: usize, j1: usize, r1: usize, i2: usize, j2: usize, r2: usize },
    #[error("table must be {0}x{0}")]
    Shape(usize),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Snf(#[from] SnfError),
}

/// `entries[i][j]` is H^i(B, R^j f_* Z); base degree i, fibre degree j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E2Table {
    pub n: usize,
    pub entries: Vec<Vec<AbelianGroup>>,
}

/// Torsion of the twelve non-corner positions of a three-dimensional table, keyed by (i, j).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionData {
    #[serde(default)]
    pub t11: Vec<u64>,
    #[serde(default)]
    pub t12: Vec<u64>,
    #[serde(default)]
    pub t21: Vec<u64>,
    #[serde(default)]
    pub t22: Vec<u64>,
    #[serde(default)]
    pub t20: Vec<u64>,
    #[serde(default)]
    pub t23: Vec<u64>,
    #[serde(default)]
    pub t31: Vec<u64>,
    #[serde(default)]
    pub t32: Vec<u64>,
}

impl E2Table {
    pub fn get(&self, i: usize, j: usize) -> &AbelianGroup {
        &self.entries[i][j]
    }

    pub fn torsion(&self, i: usize, j: usize) -> AbelianGroup {
        self.entries[i][j].torsion_part()
    }

    /// The K3 table: Z in the corners, H^1(B, R^1) in the middle, R^1 contributing
    /// H^0 and H^2 in the middle row.
    pub fn k3(ls: &LocalSystemOnSphere) -> Result<Self, TableError> {
        let r1 = pushforward_cohomology(ls)?;
        let z = AbelianGroup::free(1);
        let o = AbelianGroup::zero();
        let [h0, h1, h2] = r1.groups;
        let entries = vec![
            vec![z.clone(), h0, z.clone()],
            vec![o.clone(), h1, o],
            vec![z.clone(), h2, z],
        ];
        Ok(Self { n: 2, entries })
    }

    /// A three-dimensional table in the standard layout.
    pub fn n3(h11: usize, h12: usize, t: &TorsionData) -> Result<Self, TableError> {
        let g = |rank: usize, tors: &[u64]| AbelianGroup::from_orders(rank, tors);
        let z = AbelianGroup::free(1);
        let o = AbelianGroup::zero();
        let entries = vec![
            vec![z.clone(), o.clone(), o.clone(), z.clone()],
            vec![o.clone(), g(h11, &t.t11)?, g(h12, &t.t12)?, o],
            vec![g(0, &t.t20)?, g(h12, &t.t21)?, g(h11, &t.t22)?, g(0, &t.t23)?],
            vec![z.clone(), g(0, &t.t31)?, g(0, &t.t32)?, z],
        ];
        e2_assemble(entries)
    }

    /// Rows from fibre degree n down to 0, columns by base degree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for j in (0..=self.n).rev() {
            let row: Vec<String> = (0..=self.n).map(|i| format!("{:>14}", self.get(i, j).to_string())).collect();
            out.push_str(&format!("j={j} |{}\n", row.join("")));
        }
        out
    }
}

/// Validates a user-supplied three-dimensional grid against the layout and
/// normalizes its torsion.
pub fn e2_assemble(entries: Vec<Vec<AbelianGroup>>) -> Result<E2Table, TableError> {
    if entries.len() != 4 || entries.iter().any(|c| c.len() != 4) {
        return Err(TableError::Shape(4));
    }
    let entries = entries
        .into_iter()
        .map(|c| c.into_iter().map(|g| g.normalized()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let table = E2Table { n: 3, entries };
    if let Some(err) = layout_violations(&table).into_iter().next() {
        return Err(err);
    }
    Ok(table)
}

fn layout_violations(t: &E2Table) -> Vec<TableError> {
    let mut out = Vec::new();
    let pattern = |i: usize, j: usize, required: &'static str, ok: bool| {
        (!ok).then(|| TableError::Pattern { i, j, found: t.get(i, j).to_string(), required })
    };
    for (i, j) in [(0, 0), (3, 0), (0, 3), (3, 3)] {
        let g = t.get(i, j);
        out.extend(pattern(i, j, "Z", g.rank == 1 && g.is_torsion_free()));
    }
    for (i, j) in [(1, 0), (0, 1), (0, 2), (1, 3)] {
        out.extend(pattern(i, j, "0", *t.get(i, j) == AbelianGroup::zero()));
    }
    for (i, j) in [(2, 0), (2, 3), (3, 1), (3, 2)] {
        out.extend(pattern(i, j, "a torsion group", t.get(i, j).rank == 0));
    }
    for ((i1, j1), (i2, j2)) in [((1, 1), (2, 2)), ((1, 2), (2, 1))] {
        let (r1, r2) = (t.get(i1, j1).rank, t.get(i2, j2).rank);
        if r1 != r2 {
            out.push(TableError::RankMismatch { i1, j1, r1, i2, j2, r2 });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub relations: Vec<RelationOutcome>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| r.passed)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.relations.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect()
    }

    pub fn outcome(&self, name: &str) -> Option<&RelationOutcome> {
        self.relations.iter().find(|r| r.name == name)
    }
}

/// Torsion order of H^even and H^odd of the total space, assembled from the table
/// diagonals i + j = k by multiplying cardinalities.
pub fn total_torsion_orders(t: &E2Table) -> (u128, u128) {
    let mut even = 1u128;
    let mut odd = 1u128;
    for i in 0..=t.n {
        for j in 0..=t.n {
            let c = t.get(i, j).torsion_order();
            if (i + j) % 2 == 0 {
                even *= c;
            } else {
                odd *= c;
            }
        }
    }
    (even, odd)
}

/// Pass/fail per relation between a table and its dual.
pub fn duality_checks(t: &E2Table, dual: &E2Table) -> DualityReport {
    let mut rel = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| rel.push(RelationOutcome { name, passed, detail });
    if t.n != 3 || dual.n != 3 || !square(t) || !square(dual) {
        push("shape".into(), false, "both tables must be 4x4".into());
        return DualityReport { relations: rel };
    }
    for (label, table) in [("table", t), ("dual", dual)] {
        let v = layout_violations(table);
        push(
            format!("layout ({label})"),
            v.is_empty(),
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        );

        let mut bad = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if table.get(i, j).rank != table.get(3 - i, 3 - j).rank {
                    bad.push(format!("({i},{j})"));
                }
            }
        }
        push(format!("rank symmetry ({label})"), bad.is_empty(), bad.join(" "));

        for ((i1, j1), (i2, j2)) in [((1, 1), (3, 2)), ((1, 2), (3, 1)), ((2, 1), (2, 2)), ((2, 3), (2, 0))] {
            let (a, b) = (table.torsion(i1, j1), table.torsion(i2, j2));
            push(
                format!("T{i1}{j1} = T{i2}{j2} ({label})"),
                a == b,
                format!("{a} vs {b}"),
            );
        }
    }

    let mut bad = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if dual.get(i, j) != t.get(i, 3 - j) {
                bad.push(format!("dual({i},{j}) = {} but table({i},{}) = {}", dual.get(i, j), 3 - j, t.get(i, 3 - j)));
            }
        }
    }
    push("cross-table".into(), bad.is_empty(), bad.join("; "));

    let (even, odd) = total_torsion_orders(t);
    let (dual_even, dual_odd) = total_torsion_orders(dual);
    push("even torsion = dual odd torsion".into(), even == dual_odd, format!("{even} vs {dual_odd}"));
    push("odd torsion = dual even torsion".into(), odd == dual_even, format!("{odd} vs {dual_even}"));
    DualityReport { relations: rel }
}

fn square(t: &E2Table) -> bool {
    t.entries.len() == t.n + 1 && t.entries.iter().all(|c| c.len() == t.n + 1)
}

/// The table obtained by the cross-table rule: dual(i, j) = table(i, 3 - j).
pub fn dual_by_rule(t: &E2Table) -> E2Table {
    let entries = (0..4).map(|i| (0..4).map(|j| t.get(i, 3 - j).clone()).collect()).collect();
    E2Table { n: 3, entries }
}
