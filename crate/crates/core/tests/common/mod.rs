//! Shared test support: an independent brute-force tree-edit-distance
//! oracle, a direct transcription of the pagination gate pseudocode,
//! random tag-hash generation, and simulator fixture builders. Nothing
//! here calls into the implementation paths it is used to check.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use ugcmine_core::taghash::TagHash;

// ---------------------------------------------------------------------------
// Brute-force ordered-tree edit distance, unit costs.

fn forest_size(forest: &[TagHash]) -> usize {
    forest.iter().map(tree_size).sum()
}

fn tree_size(t: &TagHash) -> usize {
    1 + forest_size(&t.children)
}

fn forest_key(forest: &[TagHash]) -> String {
    let mut out = String::new();
    for t in forest {
        out.push_str(&t.key);
        out.push('(');
        out.push_str(&forest_key(&t.children));
        out.push(')');
    }
    out
}

fn splice(first_children: &[TagHash], rest: &[TagHash]) -> Vec<TagHash> {
    let mut out = first_children.to_vec();
    out.extend_from_slice(rest);
    out
}

fn forest_distance(
    f1: &[TagHash],
    f2: &[TagHash],
    memo: &mut HashMap<(String, String), usize>,
) -> usize {
    if f1.is_empty() {
        return forest_size(f2);
    }
    if f2.is_empty() {
        return forest_size(f1);
    }
    let key = (forest_key(f1), forest_key(f2));
    if let Some(&d) = memo.get(&key) {
        return d;
    }
    let (t1, rest1) = f1.split_first().unwrap();
    let (t2, rest2) = f2.split_first().unwrap();

    let delete = 1 + forest_distance(&splice(&t1.children, rest1), f2, memo);
    let insert = 1 + forest_distance(f1, &splice(&t2.children, rest2), memo);
    let relabel = usize::from(t1.key != t2.key)
        + forest_distance(&t1.children, &t2.children, memo)
        + forest_distance(rest1, rest2, memo);

    let d = delete.min(insert).min(relabel);
    memo.insert(key, d);
    d
}

/// Exact ordered-tree edit distance with unit insert/delete/relabel costs.
pub fn tree_edit_distance(a: &TagHash, b: &TagHash) -> usize {
    let mut memo = HashMap::new();
    forest_distance(
        std::slice::from_ref(a),
        std::slice::from_ref(b),
        &mut memo,
    )
}

/// Edit distance normalized the same way the similarity score is, so the
/// two quantities rank pairs on a comparable scale.
pub fn normalized_ted_similarity(a: &TagHash, b: &TagHash) -> f64 {
    let d = tree_edit_distance(a, b) as f64;
    let denom = tree_size(a).max(tree_size(b)) as f64;
    1.0 - d / denom
}

// ---------------------------------------------------------------------------
// Direct transcription of the numbered-pagination pseudocode gates.

/// Independent span collapsing used only by the transcription below.
fn int_span_reference(digits: &[i64]) -> Vec<(i64, i64)> {
    let mut spans: Vec<(i64, i64)> = Vec::new();
    for &d in digits {
        if let Some(last) = spans.last_mut() {
            if d == last.1 + 1 {
                last.1 = d;
                continue;
            }
        }
        spans.push((d, d));
    }
    spans
}

/// The three conditions, transcribed step by step: consecutive integers
/// exist (spans compress the list), the integers appeared in order, and
/// there are at least as many links as integers. Nested on purpose to
/// mirror the stated gate order.
#[allow(clippy::collapsible_if)]
pub fn find_pagination_numbers_reference(digits: &[i64], link_count: usize) -> bool {
    let spans = int_span_reference(digits);
    if digits.len() > spans.len() {
        let mut sorted = digits.to_vec();
        sorted.sort();
        if sorted == digits {
            if link_count >= digits.len() {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Random tag hashes.

const TAGS: &[&str] = &["li", "div", "p", "a", "span", "ul", "h3", "dl"];
const BITS: &[&str] = &["00", "01", "10", "11"];

fn random_key<R: Rng>(rng: &mut R) -> String {
    format!(
        "{}.{}",
        TAGS[rng.gen_range(0..TAGS.len())],
        BITS[rng.gen_range(0..BITS.len())]
    )
}

fn build_tree<R: Rng>(rng: &mut R, nodes: usize) -> TagHash {
    let key = random_key(rng);
    let mut remaining = nodes - 1;
    let mut children = Vec::new();
    while remaining > 0 {
        let take = rng.gen_range(1..=remaining);
        children.push(build_tree(rng, take));
        remaining -= take;
    }
    TagHash::node(key, children)
}

/// A random tag hash with between 1 and `max_nodes` nodes.
pub fn random_taghash<R: Rng>(rng: &mut R, max_nodes: usize) -> TagHash {
    let n = rng.gen_range(1..=max_nodes);
    build_tree(rng, n)
}

// ---------------------------------------------------------------------------
// Simulator fixtures.

pub fn write_fixture(dir: &Path, initial: &str, pages: &[(&str, &str)], transitions_json: &str) {
    std::fs::write(dir.join("initial.html"), initial).unwrap();
    for (name, html) in pages {
        std::fs::write(dir.join(name), html).unwrap();
    }
    std::fs::write(dir.join("transitions.json"), transitions_json).unwrap();
}

/// A comment list page in the golden template shape; `extra` markup (a
/// pager, an expand link) lands between the list and the body close.
pub fn comment_page(names_dates_bodies: &[(&str, &str, &str)], extra: Option<&str>) -> String {
    let mut html = String::from(
        "<!DOCTYPE html>\n<html><head><title>fixture</title></head><body>\n<ul class=\"comments\">\n",
    );
    for (name, date, body) in names_dates_bodies {
        html.push_str(&format!(
            "<li class=\"entry\"><h3>{name}:</h3><p class=\"when\">{date}</p><p>{body}</p><ul></ul></li>\n"
        ));
    }
    html.push_str("</ul>\n");
    if let Some(p) = extra {
        html.push_str(p);
    }
    html.push_str("</body></html>\n");
    html
}

/// Distinct comment tuples with long bodies, deterministic in `base`.
pub fn comment_rows(base: usize, count: usize) -> Vec<(String, String, String)> {
    (0..count)
        .map(|i| {
            let k = base + i;
            (
                format!("Writer{k}"),
                format!("{} Mar 2019 {}:{:02}:{:02}pm", 1 + k % 27, 1 + k % 11, k % 60, (k * 7) % 60),
                format!(
                    "Body number {k} carries enough ordinary words to classify as message text in every fixture."
                ),
            )
        })
        .collect()
}

pub fn as_refs(rows: &[(String, String, String)]) -> Vec<(&str, &str, &str)> {
    rows.iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect()
}

/// Find the positional xpath of the first anchor whose text is `label`.
pub fn anchor_xpath(html: &str, label: &str) -> String {
    let doc = ugcmine_core::dom::parse_html(html).unwrap();
    let id = doc
        .elements()
        .find(|&n| doc.tag(n) == Some("a") && doc.inner_text(n) == label)
        .unwrap_or_else(|| panic!("no anchor labelled {label}"));
    doc.positional_xpath(id)
}
