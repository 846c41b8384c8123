//! Corpus-level pipeline: interact where a page ships a scripted fixture,
//! discover and extract on every cached state, and score the union.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::{match_records, score, Annotation, GainRow, GainTable, PageScore, ScoreReport};
use crate::config::Config;
use crate::dom::{collapse_ws, parse_html, Document};
use crate::error::{Error, Result};
use crate::interact::{plan_interactions, run_plan, PageDriver, SimulatorDriver};
use crate::snapshot::SnapshotStore;
use crate::wrapper::{discover, Record};

#[derive(Debug, Clone)]
pub struct PageOutcome {
    pub page_id: String,
    /// Deduplicated records over every state the page exposed.
    pub records: Vec<Record>,
    /// Records available from the initial state alone (AR).
    pub without_interaction: usize,
    /// Records after automated interaction (AR-P); equals
    /// `without_interaction` on static pages.
    pub with_interaction: usize,
    pub snapshots: usize,
    pub interactive: bool,
}

fn discovered_records(doc: &Document, cfg: &Config) -> Vec<Record> {
    discover(doc, cfg).into_iter().flat_map(|d| d.records).collect()
}

fn record_key(r: &Record) -> (String, String, String) {
    let n = |v: &[String]| collapse_ws(v.first().map(String::as_str).unwrap_or("")).trim().to_string();
    (n(&r.name), n(&r.datetime), n(&r.content))
}

/// Drop exact duplicates (snapshots overlap by construction), keeping
/// first-seen order.
pub fn dedupe_records(records: Vec<Record>) -> Vec<Record> {
    let mut seen = HashSet::new();
    records
        .into_iter()
        .filter(|r| seen.insert(record_key(r)))
        .collect()
}

/// Run one corpus page end to end. Pages with a `transitions.json`
/// fixture are driven through the scripted simulator; the union of
/// records over all cached snapshots is the page's extraction.
pub fn run_page(page_dir: &Path, cfg: &Config) -> Result<PageOutcome> {
    let page_id = page_dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let html = std::fs::read_to_string(page_dir.join("page.html")).or_else(|_| {
        std::fs::read_to_string(page_dir.join("initial.html"))
    })?;
    let initial = parse_html(&html)?;
    let base = dedupe_records(discovered_records(&initial, cfg));
    let without_interaction = base.len();

    if !page_dir.join("transitions.json").exists() {
        return Ok(PageOutcome {
            page_id,
            with_interaction: without_interaction,
            without_interaction,
            records: base,
            snapshots: 1,
            interactive: false,
        });
    }

    let mut driver = SimulatorDriver::from_fixture(page_dir)?;
    let mut store = SnapshotStore::in_memory();
    let plan = plan_interactions(&driver.current_dom()?, &cfg.lexicon, &cfg.limits);
    run_plan(&mut driver, &plan, &mut store, &cfg.lexicon, &cfg.limits)?;

    let mut all = Vec::new();
    for id in store.ids() {
        let state_html = store.read_html(&id)?;
        let mut doc = parse_html(&state_html)?;
        doc.snapshot_id = id;
        all.extend(discovered_records(&doc, cfg));
    }
    let records = dedupe_records(all);
    Ok(PageOutcome {
        page_id,
        with_interaction: records.len(),
        without_interaction,
        snapshots: store.len(),
        records,
        interactive: true,
    })
}

fn annotated_page_dirs(corpus_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for entry in std::fs::read_dir(corpus_dir)? {
        let path = entry?.path();
        if path.is_dir() && path.join("annotation.json").exists() {
            dirs.push(path);
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::MissingAnnotation(format!(
            "no annotated pages under {}",
            corpus_dir.display()
        )));
    }
    Ok(dirs)
}

pub fn load_annotation(page_dir: &Path) -> Result<Annotation> {
    let raw = std::fs::read_to_string(page_dir.join("annotation.json")).map_err(|e| {
        Error::MissingAnnotation(format!("{}: {e}", page_dir.join("annotation.json").display()))
    })?;
    Ok(serde_json::from_str(&raw)?)
}

/// Score a whole corpus, returning the metrics report plus the
/// interaction-gain table for pages that shipped fixtures.
pub fn evaluate_corpus(corpus_dir: &Path, cfg: &Config) -> Result<(ScoreReport, GainTable)> {
    let mut per_page = Vec::new();
    let mut gain = GainTable::default();
    for dir in annotated_page_dirs(corpus_dir)? {
        let annotation = load_annotation(&dir)?;
        let outcome = run_page(&dir, cfg)?;
        let (found, relevant) = match_records(&outcome.records, &annotation.expected_records);
        per_page.push(PageScore {
            page_id: annotation.page_id.clone(),
            found,
            relevant,
            available: annotation.expected_records.len(),
        });
        if outcome.interactive {
            gain.rows.push(GainRow {
                page_id: annotation.page_id,
                with_interaction: outcome.with_interaction,
                without_interaction: outcome.without_interaction,
            });
        }
    }
    Ok((score(per_page), gain))
}

/// The AR-P versus AR table over a corpus's fixture-bearing pages.
pub fn interaction_gain(corpus_dir: &Path, cfg: &Config) -> Result<GainTable> {
    let (_, gain) = evaluate_corpus(corpus_dir, cfg)?;
    if gain.rows.is_empty() {
        return Err(Error::Fixture(
            "interaction gain needs at least one page with a transitions.json fixture".into(),
        ));
    }
    Ok(gain)
}
