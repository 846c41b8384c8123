//! Interaction discovery and planning: expansion/redirect links, numbered
//! pagination, and ordered click plans executed against a page driver.

pub mod driver;
pub mod pagination;
pub mod runner;

pub use driver::{PageDriver, SimulatorDriver};
pub use pagination::{find_pagination, int_span, pagination_gates, PaginationBlock, Span};
pub use runner::{run_plan, RunReport};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::dom::{Document, NodeId};

/// Words that signal links leading to additional discussion content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkLexicon {
    pub qualifier_words: Vec<String>,
    pub noun_words: Vec<String>,
    /// Phrases that disqualify a candidate outright ("comments are closed").
    pub exclusions: Vec<String>,
}

impl Default for LinkLexicon {
    fn default() -> Self {
        let v = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        LinkLexicon {
            qualifier_words: v(&["read", "more", "all", "show"]),
            noun_words: v(&["comments", "replies"]),
            exclusions: v(&[
                "comment policy",
                "comments are closed",
                "commenting is closed",
                "sign in to comment",
                "log in to comment",
                "no more comments",
            ]),
        }
    }
}

/// Generate the case-insensitive link-matching regex: any qualifier word
/// together with any noun word (either order), or digits right before a
/// noun word. All words match on whole-word boundaries.
pub fn build_link_regex(lex: &LinkLexicon) -> String {
    let alt = |words: &[String]| {
        words
            .iter()
            .map(|w| regex::escape(w))
            .collect::<Vec<_>>()
            .join("|")
    };
    let q = alt(&lex.qualifier_words);
    let n = alt(&lex.noun_words);
    format!(
        r"(?i)^(?:.*\b(?:{q})\b.*\b(?:{n})\b.*|.*\b(?:{n})\b.*\b(?:{q})\b.*|.*\d+\s*\b(?:{n})\b.*)$"
    )
}

pub fn link_matcher(lex: &LinkLexicon) -> Regex {
    Regex::new(&build_link_regex(lex)).expect("lexicon regex is well-formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// In-page control expected to inject content.
    Expand,
    /// Anchor that navigates to a separate page of content.
    Redirect,
}

#[derive(Debug, Clone)]
pub struct ExpansionLink {
    pub xpath: String,
    pub kind: LinkKind,
    pub href: Option<String>,
    pub text: String,
}

fn is_interactable(doc: &Document, id: NodeId) -> bool {
    if doc.has_attr(id, "onclick") {
        return true;
    }
    match doc.tag(id) {
        Some("a") | Some("button") => true,
        Some("input") => matches!(doc.attr(id, "type"), Some("button") | Some("submit")),
        _ => false,
    }
}

/// Interactable elements whose visible text matches the lexicon regex.
/// Anchors with a real (non-fragment, non-script) href are redirects;
/// everything else is an in-page expansion.
pub fn find_expansion_links(doc: &Document, lex: &LinkLexicon) -> Vec<ExpansionLink> {
    let matcher = link_matcher(lex);
    let mut out = Vec::new();
    for id in doc.elements() {
        if !is_interactable(doc, id) {
            continue;
        }
        let text = match doc.tag(id) {
            Some("input") => doc.attr(id, "value").unwrap_or("").to_string(),
            _ => doc.inner_text(id),
        };
        if text.is_empty() || !matcher.is_match(&text) {
            continue;
        }
        let lower = text.to_lowercase();
        if lex.exclusions.iter().any(|e| lower.contains(e)) {
            continue;
        }
        let href = doc.attr(id, "href").map(str::to_string);
        let kind = match &href {
            Some(h) if doc.tag(id) == Some("a") => {
                let h = h.trim();
                if h.is_empty() || h.starts_with('#') || h.starts_with("javascript:") {
                    LinkKind::Expand
                } else {
                    LinkKind::Redirect
                }
            }
            _ => LinkKind::Expand,
        };
        out.push(ExpansionLink {
            xpath: doc.positional_xpath(id),
            kind,
            href,
            text,
        });
    }
    out
}

/// Bounds on plan execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Limits {
    pub max_pages: usize,
    pub max_expand_depth: usize,
    pub max_actions: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pages: 50,
            max_expand_depth: 5,
            max_actions: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    FollowRedirect,
    Expand,
    All,
    Next,
    GotoPage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub kind: ActionKind,
    /// Positional xpath, or a URL for redirects. Next actions carry the
    /// pagination container xpath so the control can be re-located on each
    /// new page state.
    pub target: String,
    pub max_repeats: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InteractionPlan {
    pub actions: Vec<Action>,
}

impl InteractionPlan {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Order a page's interactions: redirects first (each spawns its own
/// sub-collection), then expansions, then pagination — an "all" control if
/// present, else repeated "next", else one visit per numbered link.
pub fn plan_interactions(doc: &Document, lex: &LinkLexicon, limits: &Limits) -> InteractionPlan {
    let mut actions = Vec::new();
    let links = find_expansion_links(doc, lex);
    for link in links.iter().filter(|l| l.kind == LinkKind::Redirect) {
        actions.push(Action {
            kind: ActionKind::FollowRedirect,
            target: link.href.clone().unwrap_or_default(),
            max_repeats: 1,
        });
    }
    for link in links.iter().filter(|l| l.kind == LinkKind::Expand) {
        actions.push(Action {
            kind: ActionKind::Expand,
            target: link.xpath.clone(),
            max_repeats: 1,
        });
    }
    if let Some(block) = find_pagination(doc) {
        if let Some(all) = &block.all_xpath {
            actions.push(Action {
                kind: ActionKind::All,
                target: all.clone(),
                max_repeats: 1,
            });
        } else if block.next_xpath.is_some() {
            let highest = block.numbered_links.last().map(|(v, _)| *v).unwrap_or(0);
            let known_pages = usize::try_from(highest).unwrap_or(0).saturating_sub(1);
            let repeats = if known_pages == 0 {
                limits.max_pages.saturating_sub(1)
            } else {
                known_pages.min(limits.max_pages.saturating_sub(1))
            };
            actions.push(Action {
                kind: ActionKind::Next,
                target: block.container_xpath.clone(),
                max_repeats: repeats,
            });
        } else {
            for (value, xpath) in &block.numbered_links {
                if *value == 1 {
                    continue;
                }
                if usize::try_from(*value).unwrap_or(usize::MAX) > limits.max_pages {
                    break;
                }
                actions.push(Action {
                    kind: ActionKind::GotoPage,
                    target: xpath.clone(),
                    max_repeats: 1,
                });
            }
        }
    }
    InteractionPlan { actions }
}
