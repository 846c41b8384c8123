//! Probabilistic field typing over a cluster's aligned value columns.
//!
//! Values for the same relative path are collected across every cluster
//! member, each value is run through per-type boolean tests, and the mean
//! of those booleans is the probability that the column holds that type.
//! A column is typed when its best probability clears the threshold;
//! constant templated columns are discarded outright.

pub mod datetime;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dom::{Document, FieldPath, NodeId, PathStep, Terminal};
use crate::miner::Cluster;
use crate::similarity::{is_similar, PenaltyConfig};
use crate::taghash::tag_hash;

pub use datetime::{contains_datetime, normalize_datetime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldType {
    Datetime,
    Url,
    Text,
    String,
}

impl fmt::Display for FieldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FieldType::Datetime => "datetime",
            FieldType::Url => "url",
            FieldType::Text => "text",
            FieldType::String => "string",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TypeThresholds {
    /// Minimum probability for a column to take a type.
    pub threshold: f64,
    /// Columns present in fewer members than this fraction are optional.
    pub presence_threshold: f64,
    /// Word count at which a value reads as text.
    pub text_min_words: usize,
    /// Maximum word count for a short string.
    pub string_max_words: usize,
    /// Maximum punctuation-to-character ratio for a short string.
    pub string_punctuation_cap: f64,
}

impl Default for TypeThresholds {
    fn default() -> Self {
        TypeThresholds {
            threshold: 0.75,
            presence_threshold: 0.5,
            text_min_words: 10,
            string_max_words: 8,
            string_punctuation_cap: 0.3,
        }
    }
}

/// Where a column's values came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnSource {
    ElementText,
    HrefAttr,
}

/// Values of one relative path aligned across cluster members. A `None`
/// slot means that member has no node at the path.
#[derive(Debug, Clone)]
pub struct FieldColumn {
    pub steps: Vec<PathStep>,
    pub source: ColumnSource,
    pub values: Vec<Option<String>>,
    /// Members where the element has direct (non-descendant) text.
    pub direct_text_members: usize,
    /// Set on columns synthesized by text-parent collapsing; forces the
    /// inner_text terminal.
    pub collapsed: bool,
}

impl FieldColumn {
    pub fn present(&self) -> usize {
        self.values.iter().flatten().count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedField {
    pub path: FieldPath,
    pub datatype: FieldType,
    pub probability: f64,
    pub optional: bool,
}

/// Typed field paths grouped per datatype, in discovery order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypeMap {
    pub datetime: Vec<FieldPath>,
    pub url: Vec<FieldPath>,
    pub text: Vec<FieldPath>,
    pub string: Vec<FieldPath>,
}

impl TypeMap {
    pub fn is_empty(&self) -> bool {
        self.datetime.is_empty() && self.url.is_empty() && self.text.is_empty() && self.string.is_empty()
    }
}

/// Maximum path length below the cluster anchor that gets a column.
pub const MAX_FIELD_STEPS: usize = 4;

/// Collect aligned value columns from every member's descendants, skipping
/// subtrees that are themselves nested occurrences of the anchor structure
/// (replies inside comments must not leak fields into their parents).
pub fn collect_fields(
    doc: &Document,
    cluster: &Cluster,
    canopy_depth: usize,
    cfg: &PenaltyConfig,
) -> Vec<FieldColumn> {
    let n = cluster.members.len();
    let mut order: Vec<(Vec<PathStep>, ColumnSource)> = Vec::new();
    let mut columns: HashMap<(Vec<PathStep>, ColumnSource), FieldColumn> = HashMap::new();

    for (mi, &member) in cluster.members.iter().enumerate() {
        let anchor_hash = tag_hash(doc, member, canopy_depth);
        // Descendants whose own hash resembles the anchor's are nested
        // occurrences of the structure; they and the containers holding
        // them contribute no text fields to this member.
        let nested_roots: Vec<NodeId> = doc
            .descendant_elements(member)
            .into_iter()
            .filter(|d| is_similar(&tag_hash(doc, *d, canopy_depth), &anchor_hash, cfg))
            .collect();
        let holds_nested =
            |id: NodeId| nested_roots.iter().any(|r| *r == id || doc.is_ancestor(id, *r));

        let mut stack: Vec<(NodeId, Vec<PathStep>)> = vec![(member, Vec::new())];
        while let Some((node, steps)) = stack.pop() {
            let mut kids: Vec<NodeId> = doc.child_elements(node).collect();
            kids.reverse();
            for child in kids {
                if steps.len() + 1 > MAX_FIELD_STEPS || nested_roots.contains(&child) {
                    continue;
                }
                let mut child_steps = steps.clone();
                child_steps.push(PathStep {
                    tag: doc.tag(child).unwrap().to_string(),
                    index: doc.positional_index(child),
                });

                let content = doc.content_text(child);
                if !content.is_empty() && !holds_nested(child) {
                    let key = (child_steps.clone(), ColumnSource::ElementText);
                    let col = columns.entry(key.clone()).or_insert_with(|| {
                        order.push(key.clone());
                        FieldColumn {
                            steps: child_steps.clone(),
                            source: ColumnSource::ElementText,
                            values: vec![None; n],
                            direct_text_members: 0,
                            collapsed: false,
                        }
                    });
                    col.values[mi] = Some(content);
                    if !doc.direct_text(child).is_empty() {
                        col.direct_text_members += 1;
                    }
                }
                if doc.tag(child) == Some("a") {
                    if let Some(href) = doc.attr(child, "href") {
                        let key = (child_steps.clone(), ColumnSource::HrefAttr);
                        let col = columns.entry(key.clone()).or_insert_with(|| {
                            order.push(key.clone());
                            FieldColumn {
                                steps: child_steps.clone(),
                                source: ColumnSource::HrefAttr,
                                values: vec![None; n],
                                direct_text_members: 0,
                                collapsed: false,
                            }
                        });
                        col.values[mi] = Some(href.to_string());
                    }
                }
                stack.push((child, child_steps));
            }
        }
    }
    order.into_iter().map(|key| columns.remove(&key).unwrap()).collect()
}

fn word_count(v: &str) -> usize {
    v.split_whitespace().count()
}

fn punctuation_ratio(v: &str) -> f64 {
    let chars: Vec<char> = v.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return 0.0;
    }
    let punct = chars.iter().filter(|c| c.is_ascii_punctuation()).count();
    punct as f64 / chars.len() as f64
}

fn is_url_text(v: &str) -> bool {
    let v = v.trim();
    !v.contains(char::is_whitespace)
        && regex::Regex::new(r"^[a-zA-Z][a-zA-Z0-9+.-]*://\S+$")
            .unwrap()
            .is_match(v)
}

/// Assign a datatype to a column, or discard it. Constant templated
/// columns (present in every member with identical values) return `None`,
/// as do columns whose best probability misses the threshold. Ties break
/// by precedence: datetime, url, text, string.
pub fn classify_column(col: &FieldColumn, th: &TypeThresholds) -> Option<TypedField> {
    let present: Vec<&str> = col.values.iter().flatten().map(|s| s.as_str()).collect();
    if present.is_empty() {
        return None;
    }
    if present.len() == col.values.len() && present.iter().all(|v| *v == present[0]) {
        return None;
    }
    let n = present.len() as f64;
    let mean = |pred: &dyn Fn(&str) -> bool| present.iter().filter(|v| pred(v)).count() as f64 / n;

    let p_datetime = mean(&contains_datetime);
    let p_url = match col.source {
        ColumnSource::HrefAttr => 1.0,
        ColumnSource::ElementText => mean(&is_url_text),
    };
    let p_text = mean(&|v: &str| v.contains('\n') || word_count(v) >= th.text_min_words);
    let p_string = mean(&|v: &str| {
        !v.contains('\n')
            && word_count(v) <= th.string_max_words
            && punctuation_ratio(v) <= th.string_punctuation_cap
    });

    let ranked = [
        (FieldType::Datetime, p_datetime),
        (FieldType::Url, p_url),
        (FieldType::Text, p_text),
        (FieldType::String, p_string),
    ];
    let mut best: Option<(FieldType, f64)> = None;
    for (ty, p) in ranked {
        if p >= th.threshold && best.is_none_or(|(_, bp)| p > bp) {
            best = Some((ty, p));
        }
    }
    let (datatype, probability) = best?;

    let terminal = match datatype {
        FieldType::Datetime => Terminal::InnerText,
        FieldType::Url => match col.source {
            ColumnSource::HrefAttr => Terminal::Attr("href".into()),
            ColumnSource::ElementText => Terminal::InnerText,
        },
        FieldType::Text => {
            if col.collapsed || col.direct_text_members * 2 <= present.len() {
                Terminal::InnerText
            } else {
                Terminal::Text
            }
        }
        FieldType::String => Terminal::StringValue,
    };
    let presence = present.len() as f64 / col.values.len() as f64;
    Some(TypedField {
        path: FieldPath::new(col.steps.clone(), terminal),
        datatype,
        probability,
        optional: presence < th.presence_threshold,
    })
}

/// Collapse runs of sibling text columns into a single column on their
/// parent. Applies only when a parent element has two or more text-typed
/// child columns and no child column of any other type, so a date
/// paragraph sitting next to body paragraphs blocks the collapse.
pub fn collapse_text_parents(
    doc: &Document,
    cluster: &Cluster,
    columns: Vec<FieldColumn>,
    th: &TypeThresholds,
) -> Vec<FieldColumn> {
    let typed: Vec<Option<TypedField>> = columns.iter().map(|c| classify_column(c, th)).collect();

    // Group typed element-text columns by their parent steps.
    let mut groups: HashMap<Vec<PathStep>, Vec<usize>> = HashMap::new();
    for (i, field) in typed.iter().enumerate() {
        if field.is_some() && !columns[i].steps.is_empty() && columns[i].source == ColumnSource::ElementText
        {
            let parent = columns[i].steps[..columns[i].steps.len() - 1].to_vec();
            groups.entry(parent).or_default().push(i);
        }
    }

    let mut drop = vec![false; columns.len()];
    let mut parents: Vec<Vec<PathStep>> = Vec::new();
    for (parent, idxs) in &groups {
        let texts: Vec<usize> = idxs
            .iter()
            .copied()
            .filter(|&i| typed[i].as_ref().unwrap().datatype == FieldType::Text)
            .collect();
        if texts.len() >= 2 && texts.len() == idxs.len() {
            for &i in &texts {
                drop[i] = true;
            }
            parents.push(parent.clone());
        }
    }
    parents.sort();

    let mut out: Vec<FieldColumn> = Vec::new();
    for (i, col) in columns.into_iter().enumerate() {
        if drop[i] {
            continue;
        }
        if parents.contains(&col.steps) && col.source == ColumnSource::ElementText {
            // The parent already had its own column; force inner_text on it.
            let mut col = col;
            col.collapsed = true;
            out.push(col);
            continue;
        }
        out.push(col);
    }
    // Synthesize parent columns that were never collected (parents with no
    // text of their own still gain one from their children).
    for parent in parents {
        let exists = out
            .iter()
            .any(|c| c.steps == parent && c.source == ColumnSource::ElementText);
        if exists {
            continue;
        }
        let mut values = Vec::new();
        let mut direct = 0;
        for &member in &cluster.members {
            let node = resolve_steps(doc, member, &parent);
            match node {
                Some(id) => {
                    let v = doc.content_text(id);
                    if !doc.direct_text(id).is_empty() {
                        direct += 1;
                    }
                    values.push(if v.is_empty() { None } else { Some(v) });
                }
                None => values.push(None),
            }
        }
        out.push(FieldColumn {
            steps: parent,
            source: ColumnSource::ElementText,
            values,
            direct_text_members: direct,
            collapsed: true,
        });
    }
    out
}

fn resolve_steps(doc: &Document, base: NodeId, steps: &[PathStep]) -> Option<NodeId> {
    let mut cur = base;
    for step in steps {
        cur = doc
            .child_elements(cur)
            .find(|c| doc.tag(*c) == Some(step.tag.as_str()) && doc.positional_index(*c) == step.index)?;
    }
    Some(cur)
}

/// Group assigned fields by datatype, preserving their discovery order.
pub fn build_type_map(fields: &[TypedField]) -> TypeMap {
    let mut map = TypeMap::default();
    for f in fields {
        match f.datatype {
            FieldType::Datetime => map.datetime.push(f.path.clone()),
            FieldType::Url => map.url.push(f.path.clone()),
            FieldType::Text => map.text.push(f.path.clone()),
            FieldType::String => map.string.push(f.path.clone()),
        }
    }
    map
}

/// Full typing pass for a cluster: collect, collapse, classify.
pub fn type_cluster(
    doc: &Document,
    cluster: &Cluster,
    canopy_depth: usize,
    penalties: &PenaltyConfig,
    th: &TypeThresholds,
) -> (Vec<TypedField>, TypeMap) {
    let columns = collect_fields(doc, cluster, canopy_depth, penalties);
    let columns = collapse_text_parents(doc, cluster, columns, th);
    let fields: Vec<TypedField> = columns.iter().filter_map(|c| classify_column(c, th)).collect();
    let map = build_type_map(&fields);
    (fields, map)
}
