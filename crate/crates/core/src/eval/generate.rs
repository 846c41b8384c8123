//! Deterministic synthetic-testbed generation.
//!
//! Pages span five template families: list-based comments, div-only feeds,
//! table rows, nested reply trees, and paginated feeds shipped with
//! scripted-driver fixtures. Every page carries an annotation with its
//! ground-truth records; the same seed always produces a byte-identical
//! corpus.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Annotation, ExpectedRecord};
use crate::dom::parse_html;
use crate::error::{Error, Result};
use crate::interact::driver::Transition;
use crate::snapshot::atomic_write;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub pages: usize,
    pub min_records: usize,
    pub max_records: usize,
    /// Fraction of pages that carry nested reply trees.
    pub nested_fraction: f64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            pages: 20,
            min_records: 10,
            max_records: 60,
            nested_fraction: 0.3,
        }
    }
}

impl GeneratorSpec {
    fn validate(&self) -> Result<()> {
        if self.pages < 5 {
            return Err(Error::GeneratorSpec("need at least 5 pages, one per template family".into()));
        }
        if self.min_records < 10 || self.max_records > 1000 || self.min_records > self.max_records {
            return Err(Error::GeneratorSpec(
                "records per page must stay within 10..=1000".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.nested_fraction) {
            return Err(Error::GeneratorSpec("nested_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    List,
    DivOnly,
    Table,
    NestedReplies,
    Paginated,
}

const NAMES: &[&str] = &[
    "Alice", "Bruno", "Carmen", "Dmitri", "Ellen", "Farid", "Greta", "Hiro", "Ines", "Jonas",
    "Karin", "Liam", "Mona", "Nadia", "Otto", "Priya", "Quinn", "Rosa", "Sven", "Tara",
];

const WORDS: &[&str] = &[
    "the", "committee", "resolved", "publish", "draft", "after", "long", "debate", "over",
    "scope", "nobody", "expected", "amendment", "survive", "second", "reading", "motion",
    "withdrawn", "before", "anyone", "could", "formal", "point", "order", "argument", "carried",
    "quietly", "through", "final", "session", "everyone", "agreed", "needed", "work", "margin",
    "difference", "between", "positions", "remains", "small",
];

const MONTHS: &[&str] = &[
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

struct ContentWell {
    rng: ChaCha8Rng,
    seen_bodies: HashSet<String>,
    base_minute: u64,
}

struct Item {
    name: String,
    datetime: String,
    body: String,
}

impl ContentWell {
    fn new(seed: u64, page_index: usize) -> ContentWell {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((page_index as u64 + 1) * 0x9E37_79B9));
        let base_minute = rng.gen_range(0..500_000u64);
        ContentWell {
            rng,
            seen_bodies: HashSet::new(),
            base_minute,
        }
    }

    fn body(&mut self) -> String {
        loop {
            let n = self.rng.gen_range(12..=24);
            let mut words = Vec::with_capacity(n);
            for _ in 0..n {
                words.push(WORDS[self.rng.gen_range(0..WORDS.len())]);
            }
            let mut body = words.join(" ");
            body.push('.');
            let mut chars = body.chars();
            let body: String = chars
                .next()
                .map(|c| c.to_uppercase().collect::<String>() + chars.as_str())
                .unwrap_or_default();
            if self.seen_bodies.insert(body.clone()) {
                return body;
            }
        }
    }

    fn datetime(&mut self, ordinal: u64) -> String {
        // Minutes since a fixed origin, spread so records stay distinct
        // and in posting order.
        let total = self.base_minute + ordinal * self.rng.gen_range(1..=9);
        let minute = total % 60;
        let hour24 = (total / 60) % 24;
        let day = 1 + (total / (60 * 24)) % 28;
        let month = MONTHS[((total / (60 * 24 * 28)) % 12) as usize];
        let year = 2014 + (total / (60 * 24 * 28 * 12)) % 8;
        let second = (total * 7) % 60;
        let (hour12, ampm) = match hour24 {
            0 => (12, "am"),
            1..=11 => (hour24, "am"),
            12 => (12, "pm"),
            _ => (hour24 - 12, "pm"),
        };
        format!("{day} {month} {year} {hour12}:{minute:02}:{second:02}{ampm}")
    }

    fn item(&mut self, ordinal: u64) -> Item {
        Item {
            name: NAMES[self.rng.gen_range(0..NAMES.len())].to_string(),
            datetime: self.datetime(ordinal),
            body: self.body(),
        }
    }
}

fn chrome_open(title: &str, skin: usize) -> String {
    format!(
        "<!DOCTYPE html>\n<html>\n<head><title>{title}</title></head>\n<body>\n\
         <div class=\"masthead-{skin}\">\n\
         <ul class=\"menu\">\n\
         <li><a href=\"/\">Home</a></li>\n\
         <li><a href=\"/news\">News</a></li>\n\
         <li><a href=\"/about\">About</a></li>\n\
         </ul>\n\
         </div>\n\
         <h1>{title}</h1>\n"
    )
}

fn chrome_close() -> &'static str {
    "<div class=\"colophon\"><p>Served from the archive tier.</p></div>\n</body>\n</html>\n"
}

fn title_for(rng: &mut ChaCha8Rng) -> String {
    let mut words = Vec::new();
    for _ in 0..4 {
        words.push(WORDS[rng.gen_range(0..WORDS.len())]);
    }
    words.join(" ")
}

fn list_items(items: &[Item], page_index: usize, heading: &str) -> String {
    let mut out = String::new();
    for (k, item) in items.iter().enumerate() {
        out.push_str(&format!(
            "<li class=\"entry\">\n\
             <{heading}>{}:</{heading}>\n\
             <p class=\"when\">{}</p>\n\
             <p>{}</p>\n\
             <p><span><a href=\"reply?t={page_index}-{k}\">Reply</a></span>\
             <span><a href=\"report?m={page_index}-{k}\">Report</a></span></p>\n\
             <ul></ul>\n\
             </li>\n",
            item.name, item.datetime, item.body
        ));
    }
    out
}

fn expected(items: &[Item]) -> Vec<ExpectedRecord> {
    items
        .iter()
        .map(|i| ExpectedRecord {
            name: i.name.clone(),
            datetime: i.datetime.clone(),
            content: i.body.clone(),
        })
        .collect()
}

struct PageFiles {
    html: String,
    extra_files: Vec<(String, String)>,
    transitions: Option<Vec<Transition>>,
    annotation_records: Vec<ExpectedRecord>,
    requires_interaction: bool,
    available_without_interaction: usize,
}

fn list_page(well: &mut ContentWell, page_index: usize, count: usize) -> PageFiles {
    let heading = if page_index.is_multiple_of(2) { "h3" } else { "h4" };
    let title = title_for(&mut well.rng);
    let items: Vec<Item> = (0..count).map(|k| well.item(k as u64)).collect();
    let mut html = chrome_open(&title, page_index);
    html.push_str(&format!("<ul class=\"thread-{page_index}\">\n"));
    html.push_str(&list_items(&items, page_index, heading));
    html.push_str("</ul>\n");
    html.push_str(chrome_close());
    let n = items.len();
    PageFiles {
        html,
        extra_files: vec![],
        transitions: None,
        annotation_records: expected(&items),
        requires_interaction: false,
        available_without_interaction: n,
    }
}

fn div_page(well: &mut ContentWell, page_index: usize, count: usize) -> PageFiles {
    let title = title_for(&mut well.rng);
    let items: Vec<Item> = (0..count).map(|k| well.item(k as u64)).collect();
    let mut html = chrome_open(&title, page_index);
    html.push_str(&format!("<div class=\"feed-{page_index}\">\n"));
    for item in &items {
        html.push_str(&format!(
            "<div class=\"card\">\n\
             <div class=\"who\">{}</div>\n\
             <div class=\"when\">{}</div>\n\
             <div class=\"what\">{}</div>\n\
             </div>\n",
            item.name, item.datetime, item.body
        ));
    }
    html.push_str("</div>\n");
    html.push_str(chrome_close());
    let n = items.len();
    PageFiles {
        html,
        extra_files: vec![],
        transitions: None,
        annotation_records: expected(&items),
        requires_interaction: false,
        available_without_interaction: n,
    }
}

fn table_page(well: &mut ContentWell, page_index: usize, count: usize) -> PageFiles {
    let title = title_for(&mut well.rng);
    let items: Vec<Item> = (0..count).map(|k| well.item(k as u64)).collect();
    let mut html = chrome_open(&title, page_index);
    html.push_str(&format!("<table class=\"posts-{page_index}\">\n"));
    html.push_str("<tr><th>Who</th><th>When</th><th>Message</th></tr>\n");
    for item in &items {
        html.push_str(&format!(
            "<tr class=\"post\"><td>{}</td><td>{}</td><td>{}</td></tr>\n",
            item.name, item.datetime, item.body
        ));
    }
    html.push_str("</table>\n");
    html.push_str(chrome_close());
    let n = items.len();
    PageFiles {
        html,
        extra_files: vec![],
        transitions: None,
        annotation_records: expected(&items),
        requires_interaction: false,
        available_without_interaction: n,
    }
}

/// A comment and, below it, its reply tree rendered into the same list
/// shape. Depth never exceeds two levels under the top comment.
fn nested_comment(
    well: &mut ContentWell,
    ordinal: &mut u64,
    budget: &mut usize,
    records: &mut Vec<ExpectedRecord>,
    depth: usize,
    force_chain: bool,
) -> String {
    let item = well.item(*ordinal);
    *ordinal += 1;
    *budget -= 1;
    records.push(ExpectedRecord {
        name: item.name.clone(),
        datetime: item.datetime.clone(),
        content: item.body.clone(),
    });
    let mut replies = String::new();
    if depth < 2 && *budget > 0 {
        let want = if force_chain {
            1
        } else if depth == 0 {
            well.rng.gen_range(0..=2usize)
        } else {
            0
        };
        for i in 0..want.min(*budget) {
            let chain = force_chain && i == 0;
            replies.push_str(&nested_comment(well, ordinal, budget, records, depth + 1, chain && depth == 0));
        }
    }
    format!(
        "<li class=\"c\">\n<h4>{}</h4>\n<p class=\"when\">{}</p>\n<p>{}</p>\n<ul class=\"replies\">\n{replies}</ul>\n</li>\n",
        item.name, item.datetime, item.body
    )
}

fn nested_page(well: &mut ContentWell, page_index: usize, count: usize) -> PageFiles {
    let title = title_for(&mut well.rng);
    let mut budget = count;
    let mut ordinal = 0u64;
    let mut records = Vec::new();
    let mut body = String::new();
    let mut first = true;
    while budget > 0 {
        // The first comment always carries a two-deep reply chain so the
        // page genuinely exercises nesting.
        body.push_str(&nested_comment(well, &mut ordinal, &mut budget, &mut records, 0, first));
        first = false;
    }
    let mut html = chrome_open(&title, page_index);
    html.push_str(&format!("<ul class=\"conversation-{page_index}\">\n"));
    html.push_str(&body);
    html.push_str("</ul>\n");
    html.push_str(chrome_close());
    let n = records.len();
    PageFiles {
        html,
        extra_files: vec![],
        transitions: None,
        annotation_records: records,
        requires_interaction: false,
        available_without_interaction: n,
    }
}

fn pager_block(pages: usize) -> String {
    let mut out = String::from("<div class=\"pager\">\n");
    for p in 1..=pages {
        out.push_str(&format!("<a href=\"#\">{p}</a>\n"));
    }
    out.push_str("<a href=\"#\">Next</a>\n</div>\n");
    out
}

fn next_anchor_xpath(html: &str) -> Result<String> {
    let doc = parse_html(html)?;
    let next = doc
        .elements()
        .find(|&id| doc.tag(id) == Some("a") && doc.inner_text(id) == "Next")
        .map(|id| doc.positional_xpath(id));
    next.ok_or_else(|| Error::Fixture("generated pager lost its next control".into()))
}

fn paginated_page(well: &mut ContentWell, page_index: usize, count: usize) -> Result<PageFiles> {
    let title = title_for(&mut well.rng);
    let subpages = 2 + (count % 2); // 2 or 3, deterministic in the count
    let items: Vec<Item> = (0..count).map(|k| well.item(k as u64)).collect();
    let per = count.div_ceil(subpages);
    let chunks: Vec<&[Item]> = items.chunks(per).collect();
    let heading = "h3";

    let mut htmls = Vec::new();
    for chunk in &chunks {
        let mut html = chrome_open(&title, page_index);
        html.push_str(&format!("<ul class=\"thread-{page_index}\">\n"));
        html.push_str(&list_items(chunk, page_index, heading));
        html.push_str("</ul>\n");
        html.push_str(&pager_block(chunks.len()));
        html.push_str(chrome_close());
        htmls.push(html);
    }

    let mut transitions = Vec::new();
    for (i, html) in htmls.iter().enumerate().take(htmls.len() - 1) {
        let state = if i == 0 { "initial".to_string() } else { format!("page{}", i + 1) };
        transitions.push(Transition {
            state,
            click: next_anchor_xpath(html)?,
            next_state: format!("page{}", i + 2),
            html: format!("page{}.html", i + 2),
        });
    }
    let extra_files = htmls
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, html)| (format!("page{}.html", i + 1), html.clone()))
        .collect();

    Ok(PageFiles {
        html: htmls[0].clone(),
        extra_files,
        transitions: Some(transitions),
        annotation_records: expected(&items),
        requires_interaction: true,
        available_without_interaction: chunks[0].len(),
    })
}

fn family_for(index: usize, spec: &GeneratorSpec) -> Family {
    let nested = (spec.pages as f64 * spec.nested_fraction).ceil() as usize;
    let paginated = (spec.pages / 5).max(2);
    if index < nested {
        Family::NestedReplies
    } else if index < nested + paginated {
        Family::Paginated
    } else {
        match (index - nested - paginated) % 3 {
            0 => Family::List,
            1 => Family::DivOnly,
            _ => Family::Table,
        }
    }
}

/// Generate the corpus under `out_dir`, one directory per page. Returns
/// the annotations in page order.
pub fn generate_testbed(seed: u64, spec: &GeneratorSpec, out_dir: &Path) -> Result<Vec<Annotation>> {
    spec.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut annotations = Vec::new();
    for index in 0..spec.pages {
        let mut well = ContentWell::new(seed, index);
        let count = well.rng.gen_range(spec.min_records..=spec.max_records);
        let family = family_for(index, spec);
        let files = match family {
            Family::List => list_page(&mut well, index, count),
            Family::DivOnly => div_page(&mut well, index, count),
            Family::Table => table_page(&mut well, index, count),
            Family::NestedReplies => nested_page(&mut well, index, count),
            Family::Paginated => paginated_page(&mut well, index, count)?,
        };
        let page_id = format!("page-{index:03}");
        let dir = out_dir.join(&page_id);
        std::fs::create_dir_all(&dir)?;
        atomic_write(&dir.join("page.html"), files.html.as_bytes())?;
        for (name, content) in &files.extra_files {
            atomic_write(&dir.join(name), content.as_bytes())?;
        }
        if let Some(transitions) = &files.transitions {
            let json = serde_json::to_string_pretty(transitions)?;
            atomic_write(&dir.join("transitions.json"), json.as_bytes())?;
        }
        let annotation = Annotation {
            page_id: page_id.clone(),
            requires_interaction: files.requires_interaction,
            available_without_interaction: files.available_without_interaction,
            expected_records: files.annotation_records,
        };
        atomic_write(
            &dir.join("annotation.json"),
            serde_json::to_string_pretty(&annotation)?.as_bytes(),
        )?;
        annotations.push(annotation);
    }
    Ok(annotations)
}
