//! Scoring harness: annotations, record matching, recall/precision/F1 in
//! both aggregation modes, and interaction-gain accounting.

pub mod generate;
pub mod pipeline;

pub use generate::{generate_testbed, GeneratorSpec};
pub use pipeline::{evaluate_corpus, interaction_gain, load_annotation, run_page, PageOutcome};

use serde::{Deserialize, Serialize};

use crate::dom::collapse_ws;
use crate::wrapper::Record;

/// Ground truth for one generated page.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Annotation {
    pub page_id: String,
    pub requires_interaction: bool,
    pub available_without_interaction: usize,
    pub expected_records: Vec<ExpectedRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedRecord {
    pub name: String,
    pub datetime: String,
    pub content: String,
}

/// Per-page tallies feeding the aggregate metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageScore {
    pub page_id: String,
    pub found: usize,
    pub relevant: usize,
    pub available: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreReport {
    pub per_page: Vec<PageScore>,
    /// Micro-averaged over every page, extraction failures included.
    pub all_results: Metrics,
    /// Restricted to pages where at least one record was found.
    pub success_only: Metrics,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn norm(s: &str) -> String {
    collapse_ws(s).trim().to_string()
}

/// Count how many extracted records are relevant: a record must match an
/// expected record on content, name and datetime (whitespace-normalized),
/// and each expected record can be consumed at most once, greedily in
/// extraction order.
pub fn match_records(extracted: &[Record], expected: &[ExpectedRecord]) -> (usize, usize) {
    let mut used = vec![false; expected.len()];
    let mut relevant = 0;
    for record in extracted {
        let name = record.name.first().map(|s| norm(s)).unwrap_or_default();
        let datetime = record.datetime.first().map(|s| norm(s)).unwrap_or_default();
        let content = record.content.first().map(|s| norm(s)).unwrap_or_default();
        let hit = expected.iter().enumerate().position(|(i, e)| {
            !used[i] && norm(&e.content) == content && norm(&e.name) == name && norm(&e.datetime) == datetime
        });
        if let Some(i) = hit {
            used[i] = true;
            relevant += 1;
        }
    }
    (extracted.len(), relevant)
}

fn aggregate(pages: &[&PageScore]) -> Metrics {
    let found: usize = pages.iter().map(|p| p.found).sum();
    let relevant: usize = pages.iter().map(|p| p.relevant).sum();
    let available: usize = pages.iter().map(|p| p.available).sum();
    let precision = if found == 0 { 0.0 } else { relevant as f64 / found as f64 };
    let recall = if available == 0 { 0.0 } else { relevant as f64 / available as f64 };
    Metrics {
        recall,
        precision,
        f1: f1_score(precision, recall),
    }
}

/// Micro-averaged metrics in both aggregation modes.
pub fn score(per_page: Vec<PageScore>) -> ScoreReport {
    let all: Vec<&PageScore> = per_page.iter().collect();
    let successes: Vec<&PageScore> = per_page.iter().filter(|p| p.found >= 1).collect();
    let all_results = aggregate(&all);
    let success_only = aggregate(&successes);
    ScoreReport {
        all_results,
        success_only,
        per_page,
    }
}

impl ScoreReport {
    /// Aligned-text table with the Total / All Results / Success Only rows.
    pub fn format_table(&self) -> String {
        let found: usize = self.per_page.iter().map(|p| p.found).sum();
        let relevant: usize = self.per_page.iter().map(|p| p.relevant).sum();
        let available: usize = self.per_page.iter().map(|p| p.available).sum();
        let mut out = String::new();
        out.push_str(&format!(
            "{:<14} {:>10} {:>10} {:>10}\n",
            "", "Found", "Relevant", "Available"
        ));
        out.push_str(&format!(
            "{:<14} {:>10} {:>10} {:>10}\n",
            "Total", found, relevant, available
        ));
        for (label, m) in [("All Results:", self.all_results), ("Success Only:", self.success_only)] {
            out.push_str(&format!("{label}\n"));
            out.push_str(&format!("  {:<12} {:>9.1}%\n", "Recall", m.recall * 100.0));
            out.push_str(&format!("  {:<12} {:>9.1}%\n", "Precision", m.precision * 100.0));
            out.push_str(&format!("  {:<12} {:>10.2}\n", "F-score", m.f1));
        }
        out
    }
}

/// Records gained through interaction for one page.
#[derive(Debug, Clone, Serialize)]
pub struct GainRow {
    pub page_id: String,
    /// Records extracted from the full interacted snapshot set (AR-P).
    pub with_interaction: usize,
    /// Records extracted from the initial state alone (AR).
    pub without_interaction: usize,
}

impl GainRow {
    pub fn increase_percent(&self) -> f64 {
        if self.without_interaction == 0 {
            if self.with_interaction == 0 {
                100.0
            } else {
                f64::INFINITY
            }
        } else {
            self.with_interaction as f64 * 100.0 / self.without_interaction as f64
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GainTable {
    pub rows: Vec<GainRow>,
}

impl GainTable {
    pub fn totals(&self) -> (usize, usize, f64) {
        let arp: usize = self.rows.iter().map(|r| r.with_interaction).sum();
        let ar: usize = self.rows.iter().map(|r| r.without_interaction).sum();
        let pct = if ar == 0 {
            if arp == 0 {
                100.0
            } else {
                f64::INFINITY
            }
        } else {
            arp as f64 * 100.0 / ar as f64
        };
        (arp, ar, pct)
    }

    pub fn format_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<28} {:>8} {:>8} {:>10}\n", "Page", "AR-P", "AR", "Increase"));
        let pct = |v: f64| {
            if v.is_finite() {
                format!("{v:.1}%")
            } else {
                "n/a".to_string()
            }
        };
        for row in &self.rows {
            out.push_str(&format!(
                "{:<28} {:>8} {:>8} {:>10}\n",
                row.page_id,
                row.with_interaction,
                row.without_interaction,
                pct(row.increase_percent())
            ));
        }
        let (arp, ar, total_pct) = self.totals();
        out.push_str(&format!("{:<28} {:>8} {:>8} {:>10}\n", "Totals", arp, ar, pct(total_pct)));
        out
    }
}
