//! Reproduction of the reference table and the structural diff against it.

use serde::{Deserialize, Serialize};
use signed_iwasawa_core::iwasawa::InvariantProfile;

use crate::config::RunConfig;
use crate::formats::{ExamplesFile, SCHEMA_VERSION};
use crate::pipeline::{run_rows, slope_text, RowOutcome, SymbolStore};

/// Expected invariants of the six published rows, kept verbatim as a fixture.
pub const EXPECTED_TABLE: &str = include_str!("../data/table1_expected.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedProfile {
    pub mu: i64,
    pub lambda: usize,
    /// `(count, valuation)` pairs, steepest first; valuations as `"a/b"`.
    pub slopes: Vec<(usize, String)>,
}

impl ExpectedProfile {
    pub fn text(&self) -> String {
        let parts: Vec<String> = self.slopes.iter().map(|(c, v)| format!("({c}:{v})")).collect();
        format!("mu={} lambda={} {{{}}}", self.mu, self.lambda, parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub label: String,
    pub discriminant: i64,
    pub plus: ExpectedProfile,
    pub minus: ExpectedProfile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedTable {
    pub schema_version: u32,
    pub p: u64,
    pub rows: Vec<ExpectedRow>,
    /// Curves whose untwisted theta^+ is a unit.
    pub base_plus_units: Vec<String>,
}

pub fn expected_table() -> ExpectedTable {
    serde_json::from_str(EXPECTED_TABLE).expect("embedded table parses")
}

fn profile_text(p: &InvariantProfile) -> String {
    format!("mu={} lambda={} {}", p.mu, p.lambda, slope_text(p))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    /// Rows present in both the run and the fixture.
    pub checked: Vec<String>,
    /// Rows run but absent from the fixture.
    pub unchecked: Vec<String>,
    /// Fixture rows that were not run.
    pub not_run: Vec<String>,
    pub diffs: Vec<String>,
    pub failed_rows: Vec<String>,
    pub matches: bool,
}

fn row_name(label: &str, d: i64) -> String {
    format!("{label}/{d}")
}

pub fn compare(outcomes: &[RowOutcome], expected: &ExpectedTable) -> Comparison {
    let mut c = Comparison::default();
    for o in outcomes {
        let (label, d) = o.key();
        let name = row_name(&label, d);
        let r = match o {
            RowOutcome::Ok(r) => r,
            RowOutcome::Failed { error, .. } => {
                c.failed_rows.push(format!("{name}: {error}"));
                continue;
            }
        };
        let Some(exp) = expected.rows.iter().find(|e| e.label == label && e.discriminant == d) else {
            c.unchecked.push(name);
            continue;
        };
        if r.p != expected.p {
            c.unchecked.push(name);
            continue;
        }
        c.checked.push(name.clone());
        for (which, got, want) in [("+", &r.theta_ek_plus, &exp.plus), ("-", &r.theta_ek_minus, &exp.minus)] {
            let got_text = profile_text(&got.profile);
            if got_text != want.text() {
                c.diffs.push(format!("{name} theta^{which}: expected {}, got {got_text}", want.text()));
            }
        }
        let base_unit = r.theta_e_plus.profile.is_unit();
        if expected.base_plus_units.contains(&label) && !base_unit {
            c.diffs.push(format!(
                "{name} untwisted theta^+: expected a unit, got {}",
                profile_text(&r.theta_e_plus.profile)
            ));
        }
    }
    for e in &expected.rows {
        if !outcomes.iter().any(|o| o.key() == (e.label.clone(), e.discriminant)) {
            c.not_run.push(row_name(&e.label, e.discriminant));
        }
    }
    c.matches = c.diffs.is_empty() && c.failed_rows.is_empty();
    c
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub schema_version: u32,
    pub kind: String,
    pub config: RunConfig,
    pub rows: Vec<RowOutcome>,
    pub comparison: Comparison,
}

/// `filter` keeps rows named `label/D` (for example `32a1/-43`).
pub fn run_table(examples: &ExamplesFile, filter: &[String], cfg: &RunConfig, store: &SymbolStore) -> TableReport {
    let rows: Vec<_> = examples
        .rows
        .iter()
        .filter(|r| filter.is_empty() || filter.contains(&row_name(&r.curve.label, r.discriminant)))
        .cloned()
        .collect();
    let outcomes = run_rows(&rows, cfg, store);
    let comparison = compare(&outcomes, &expected_table());
    TableReport { schema_version: SCHEMA_VERSION, kind: "table".into(), config: cfg.clone(), rows: outcomes, comparison }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_lists_six_rows() {
        let t = expected_table();
        assert_eq!(t.rows.len(), 6);
        let r = &t.rows[0];
        assert_eq!(r.plus.text(), "mu=0 lambda=8 {(2:1/2),(6:1/6)}");
        assert_eq!(r.minus.text(), "mu=0 lambda=2 {(2:1)}");
    }

    #[test]
    fn profile_text_matches_fixture_text() {
        use num_rational::Ratio;
        let p = InvariantProfile::from_root_valuations(0, &[Ratio::new(1, 2), Ratio::new(1, 2), Ratio::new(1, 1)], true);
        assert_eq!(profile_text(&p), "mu=0 lambda=3 {(1:1),(2:1/2)}");
    }
}
