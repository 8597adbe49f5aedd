//! Correctness and latency tables over collected runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chatfsm_core::diff::DiffCategory;
use chatfsm_llm::CassetteMode;
use serde::{Deserialize, Serialize};

use crate::pipeline::{EvalResult, Stage};
use crate::EvalError;

/// Reported time for a developer to make the same modifications by hand.
/// Not measured here.
pub const HUMAN_SECONDS: f64 = 164.0;

/// Suite name of the main pair set; other suites get their own tables.
pub const MAIN_SUITE: &str = "pairs";

/// One `eval run`: a model over a suite of pairs in one context setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub suite: String,
    pub model: String,
    pub with_context: bool,
    pub cassette_mode: CassetteMode,
    pub results: Vec<EvalResult>,
}

impl RunRecord {
    pub fn failed(&self) -> usize {
        self.results.iter().filter(|r| r.failed()).count()
    }

    pub fn count(&self, category: DiffCategory) -> usize {
        self.results.iter().filter(|r| r.category == Some(category)).count()
    }
}

/// A results file holds one or more records.
pub fn save_records(path: &Path, records: &[RunRecord]) -> Result<(), EvalError> {
    let mut text = serde_json::to_string_pretty(records).expect("records serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| EvalError::io(path, e))
}

pub fn load_records(path: &Path) -> Result<Vec<RunRecord>, EvalError> {
    let text = fs::read_to_string(path).map_err(|e| EvalError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| EvalError::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorrectnessRow {
    pub model: String,
    pub no_diff: usize,
    pub small_diff: usize,
    pub diff: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorrectnessTable {
    pub title: String,
    pub suite: String,
    pub with_context: bool,
    pub rows: Vec<CorrectnessRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LatencySource {
    /// Mean of live modification calls.
    Measured,
    /// Replies came from a cassette; no meaningful time exists.
    Replay,
    /// A fixed reported figure.
    Reported,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LatencyRow {
    pub model: String,
    pub seconds: Option<f64>,
    pub source: LatencySource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub correctness: Vec<CorrectnessTable>,
    pub latency: Vec<LatencyRow>,
}

pub fn report(records: &[RunRecord]) -> Report {
    let mut tables: BTreeMap<(bool, &str, bool), BTreeMap<&str, CorrectnessRow>> = BTreeMap::new();
    for record in records {
        let key = (record.suite != MAIN_SUITE, record.suite.as_str(), record.with_context);
        let row = tables
            .entry(key)
            .or_default()
            .entry(record.model.as_str())
            .or_insert_with(|| CorrectnessRow {
                model: record.model.clone(),
                no_diff: 0,
                small_diff: 0,
                diff: 0,
                failed: 0,
            });
        row.no_diff += record.count(DiffCategory::NoDifference);
        row.small_diff += record.count(DiffCategory::SmallDifference);
        row.diff += record.count(DiffCategory::Difference);
        row.failed += record.failed();
    }
    let correctness = tables
        .into_iter()
        .map(|((_, suite, with_context), rows)| CorrectnessTable {
            title: table_title(suite, with_context),
            suite: suite.to_owned(),
            with_context,
            rows: rows.into_values().collect(),
        })
        .collect();

    let mut by_model: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for record in records {
        by_model.entry(record.model.as_str()).or_default().push(record);
    }
    let mut latency: Vec<LatencyRow> = by_model
        .into_iter()
        .map(|(model, records)| latency_row(model, &records))
        .collect();
    latency.push(LatencyRow {
        model: "Human".into(),
        seconds: Some(HUMAN_SECONDS),
        source: LatencySource::Reported,
    });
    Report { correctness, latency }
}

fn table_title(suite: &str, with_context: bool) -> String {
    let mut title = String::from("ChatFSM Correctness");
    if with_context {
        title.push_str(" With Context");
    }
    if suite != MAIN_SUITE {
        let _ = write!(title, " ({suite})");
    }
    title
}

/// Mean modification time over live runs; any cassette-served run makes
/// the whole row a replay row.
fn latency_row(model: &str, records: &[&RunRecord]) -> LatencyRow {
    if records.iter().any(|r| r.cassette_mode != CassetteMode::Passthrough) {
        return LatencyRow {
            model: model.to_owned(),
            seconds: None,
            source: LatencySource::Replay,
        };
    }
    let times: Vec<f64> = records
        .iter()
        .flat_map(|r| &r.results)
        .filter_map(|r| r.seconds(Stage::Modify))
        .collect();
    LatencyRow {
        model: model.to_owned(),
        seconds: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
        source: LatencySource::Measured,
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if self.correctness.is_empty() {
            out.push_str("ChatFSM Correctness\n(no results)\n\n");
        }
        for table in &self.correctness {
            let _ = writeln!(out, "{}", table.title);
            out.push_str("Model | No Diff | Small Diff | Diff\n");
            for row in &table.rows {
                let _ = writeln!(out, "{} | {} | {} | {}", row.model, row.no_diff, row.small_diff, row.diff);
            }
            for row in table.rows.iter().filter(|r| r.failed > 0) {
                let _ = writeln!(out, "failed runs for {}: {}", row.model, row.failed);
            }
            out.push('\n');
        }
        out.push_str("Average Processing Times\nModel | Processing Time (s)\n");
        for row in &self.latency {
            let cell = match (row.source, row.seconds) {
                (LatencySource::Replay, _) => "replay".to_owned(),
                (LatencySource::Reported, Some(s)) => format!("{s}"),
                (_, Some(s)) => format!("{s:.1}"),
                (_, None) => "n/a".to_owned(),
            };
            let _ = writeln!(out, "{} | {cell}", row.model);
        }
        out.push_str("Human time is the reported figure for manual modification, not measured.\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use indexmap::IndexMap;

    use super::*;

    fn result(id: &str, category: Option<DiffCategory>, modify_seconds: f64) -> EvalResult {
        let mut stage_times = IndexMap::new();
        stage_times.insert(Stage::Filter, 0.001);
        stage_times.insert(Stage::Modify, modify_seconds);
        EvalResult {
            pair_id: id.into(),
            category,
            diff_messages: vec![],
            stage_times,
            failure: None,
            change_request: None,
            context_query: None,
            context_chunks: vec![],
            modify_digest: None,
        }
    }

    fn record(model: &str, with_context: bool, mode: CassetteMode, results: Vec<EvalResult>) -> RunRecord {
        RunRecord {
            suite: MAIN_SUITE.into(),
            model: model.into(),
            with_context,
            cassette_mode: mode,
            results,
        }
    }

    #[test]
    fn empty_results_give_stub() {
        let report = report(&[]);
        assert!(report.correctness.is_empty());
        let text = report.render_text();
        assert!(text.starts_with("ChatFSM Correctness\n(no results)\n"));
        assert!(text.contains("Human | 164\n"));
    }

    #[test]
    fn counts_and_replay_labels() {
        let results = vec![
            result("p1", Some(DiffCategory::NoDifference), 0.0),
            result("p2", Some(DiffCategory::SmallDifference), 0.0),
            result("p3", Some(DiffCategory::NoDifference), 0.0),
        ];
        let records = [
            record("m", false, CassetteMode::Replay, results.clone()),
            record("m", true, CassetteMode::Replay, results),
        ];
        let report = report(&records);
        assert_eq!(report.correctness.len(), 2);
        assert_eq!(report.correctness[0].title, "ChatFSM Correctness");
        assert_eq!(report.correctness[1].title, "ChatFSM Correctness With Context");
        let text = report.render_text();
        assert!(text.contains("m | 2 | 1 | 0\n"));
        assert!(text.contains("m | replay\n"));
        assert_eq!(report.latency[0].source, LatencySource::Replay);
        assert_eq!(report.latency.last().unwrap().seconds, Some(HUMAN_SECONDS));
    }

    #[test]
    fn latency_is_mean_of_modify_times() {
        let times = [12.5, 40.0, 7.25, 98.0];
        let results: Vec<EvalResult> = times.iter().map(|t| result("p", None, *t)).collect();
        let report = report(&[record("m", false, CassetteMode::Passthrough, results)]);
        let expected = times.iter().sum::<f64>() / times.len() as f64;
        assert_eq!(report.latency[0].seconds, Some(expected));
        assert_eq!(report.latency[0].source, LatencySource::Measured);
        assert!(report.render_text().contains("m | 39.4\n"));
    }

    #[test]
    fn other_suites_get_separate_tables_after_main() {
        let mut rerun = record("m", true, CassetteMode::Replay, vec![result("p3", Some(DiffCategory::NoDifference), 0.0)]);
        rerun.suite = "reruns".into();
        let main = record("m", true, CassetteMode::Replay, vec![]);
        let report = report(&[rerun, main]);
        let titles: Vec<&str> = report.correctness.iter().map(|t| t.title.as_str()).collect();
        assert_eq!(titles, ["ChatFSM Correctness With Context", "ChatFSM Correctness With Context (reruns)"]);
    }

    #[test]
    fn failures_are_counted_separately() {
        let mut failed = result("p", None, 0.0);
        failed.failure = Some(crate::pipeline::StageFailure {
            stage: Stage::Modify,
            kind: "cassette_miss".into(),
            message: "miss".into(),
        });
        let report = report(&[record("m", false, CassetteMode::Replay, vec![failed])]);
        assert_eq!(report.correctness[0].rows[0].failed, 1);
        assert!(report.render_text().contains("failed runs for m: 1\n"));
    }

    #[test]
    fn records_round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.json");
        let records = vec![record("m", false, CassetteMode::Replay, vec![result("p", None, 1.0)])];
        save_records(&path, &records).unwrap();
        assert_eq!(load_records(&path).unwrap(), records);
    }
}
