//! Numbered-pagination detection.
//!
//! A container is a pagination block when its direct children's strings
//! contain consecutive integers (so collapsing them into spans shrinks the
//! list), the integers appear in sorted order, and the container holds at
//! least as many clickable elements as integers. The deepest matching
//! container wins, which keeps a block's ancestors from shadowing it.

use std::fmt;

use crate::dom::{Document, NodeId};

/// A maximal run of consecutive integers, e.g. `1-3` or `7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: i64,
    pub end: i64,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}-{}", self.start, self.end)
        }
    }
}

/// Collapse maximal runs of consecutive integers: `[1,2,3,5]` → `[1-3, 5]`.
/// Runs are taken in the given order; no sorting happens here.
pub fn int_span(values: &[i64]) -> Vec<Span> {
    let mut spans: Vec<Span> = Vec::new();
    for &v in values {
        match spans.last_mut() {
            Some(span) if v == span.end + 1 => span.end = v,
            _ => spans.push(Span { start: v, end: v }),
        }
    }
    spans
}

/// Parse a link label as an integer. Surrounding whitespace and thousands
/// separators are tolerated; any other residue disqualifies the label.
pub fn parse_link_int(text: &str) -> Option<i64> {
    let cleaned: String = text.trim().replace(',', "");
    if cleaned.is_empty() || !cleaned.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    cleaned.parse().ok()
}

/// The three detection gates over an extracted digit list and clickable
/// count: consecutive evidence, sorted order, enough links.
pub fn pagination_gates(digits: &[i64], link_count: usize) -> bool {
    let spans = int_span(digits);
    if digits.len() <= spans.len() {
        return false;
    }
    if digits.windows(2).any(|w| w[0] > w[1]) {
        return false;
    }
    link_count >= digits.len()
}

#[derive(Debug, Clone)]
pub struct PaginationBlock {
    pub container_xpath: String,
    /// `(page number, clickable xpath)`, strictly increasing values.
    pub numbered_links: Vec<(i64, String)>,
    pub next_xpath: Option<String>,
    pub prev_xpath: Option<String>,
    pub all_xpath: Option<String>,
}

pub(crate) const NEXT_LABELS: &[&str] = &["next", ">", "»"];
pub(crate) const PREV_LABELS: &[&str] = &["previous", "prev", "<", "«"];
pub(crate) const ALL_LABELS: &[&str] = &["all"];

fn is_clickable(doc: &Document, id: NodeId) -> bool {
    match doc.tag(id) {
        Some("a") | Some("button") | Some("option") => true,
        Some("input") => matches!(doc.attr(id, "type"), Some("button") | Some("submit")),
        _ => false,
    }
}

fn clickables_within(doc: &Document, container: NodeId) -> Vec<NodeId> {
    doc.descendant_elements(container)
        .into_iter()
        .filter(|&n| is_clickable(doc, n))
        .collect()
}

/// The strings of a container's direct children; select boxes contribute
/// their option texts (falling back to the value attribute).
fn child_strings(doc: &Document, container: NodeId) -> Vec<(NodeId, String)> {
    doc.child_elements(container)
        .map(|c| {
            let text = doc.inner_text(c);
            if text.is_empty() && doc.tag(c) == Some("option") {
                (c, doc.attr(c, "value").unwrap_or("").to_string())
            } else {
                (c, text)
            }
        })
        .collect()
}

/// Find the deepest container satisfying all three gates and dress it
/// with its numbered links and any next/previous/all controls.
pub fn find_pagination(doc: &Document) -> Option<PaginationBlock> {
    let mut best: Option<(NodeId, usize)> = None;
    for el in doc.elements() {
        let digits: Vec<i64> = child_strings(doc, el)
            .iter()
            .filter_map(|(_, s)| parse_link_int(s))
            .collect();
        if digits.is_empty() {
            continue;
        }
        let links = clickables_within(doc, el).len();
        if pagination_gates(&digits, links) {
            let depth = doc.depth(el);
            if best.is_none_or(|(_, d)| depth > d) {
                best = Some((el, depth));
            }
        }
    }
    let (container, _) = best?;

    let mut numbered_links = Vec::new();
    let mut last_value = i64::MIN;
    for (child, text) in child_strings(doc, container) {
        if let Some(value) = parse_link_int(&text) {
            if value <= last_value {
                continue;
            }
            let target = if is_clickable(doc, child) {
                Some(child)
            } else {
                clickables_within(doc, child).into_iter().next()
            };
            if let Some(t) = target {
                numbered_links.push((value, doc.positional_xpath(t)));
                last_value = value;
            }
        }
    }

    let labelled = |labels: &[&str]| -> Option<String> {
        clickables_within(doc, container)
            .into_iter()
            .find(|&n| {
                let label = doc.inner_text(n).trim().to_lowercase();
                labels.contains(&label.as_str())
            })
            .map(|n| doc.positional_xpath(n))
    };

    Some(PaginationBlock {
        container_xpath: doc.positional_xpath(container),
        numbered_links,
        next_xpath: labelled(NEXT_LABELS),
        prev_xpath: labelled(PREV_LABELS),
        all_xpath: labelled(ALL_LABELS),
    })
}

/// Re-locate a control by label within a stored container xpath on a new
/// document state.
pub fn locate_control(doc: &Document, container_xpath: &str, labels: &[&str]) -> Option<String> {
    let container = doc.resolve_positional_xpath(container_xpath)?;
    clickables_within(doc, container)
        .into_iter()
        .find(|&n| labels.contains(&doc.inner_text(n).trim().to_lowercase().as_str()))
        .map(|n| doc.positional_xpath(n))
}
