//! Immutable DOM trees with positional addressing.
//!
//! Documents are parsed once and never mutated; every other stage of the
//! pipeline addresses nodes through [`NodeId`] handles and walks the tree
//! through the accessors here. Child order always equals source order, and
//! `NodeId`s are assigned in document (pre-order) order, so sorting ids sorts
//! nodes into document order.

mod fieldpath;
mod parse;
mod xpath;

pub use fieldpath::{FieldPath, PathStep, Terminal};
pub use parse::{parse_html, parse_html_bytes, parse_html_with_url};
pub use xpath::StructuralXPath;

/// Handle to a node inside a [`Document`]. Ordering follows document order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) usize);

#[derive(Debug, Clone)]
pub enum NodeKind {
    Element {
        tag: String,
        attributes: Vec<(String, String)>,
    },
    Text(String),
}

#[derive(Debug, Clone)]
pub(crate) struct NodeData {
    pub(crate) parent: Option<NodeId>,
    pub(crate) kind: NodeKind,
    pub(crate) children: Vec<NodeId>,
    /// 1-based index among same-tag element siblings; 0 for text nodes.
    pub(crate) positional_index: usize,
}

/// A parsed HTML document.
#[derive(Debug, Clone)]
pub struct Document {
    pub(crate) nodes: Vec<NodeData>,
    root: NodeId,
    pub source_url: Option<String>,
    pub snapshot_id: String,
}

/// Tags whose text content is invisible and excluded from `inner_text`.
const NON_CONTENT_TAGS: &[&str] = &["script", "style", "noscript", "template"];

/// Block-level tags; their boundaries separate text pieces with a newline,
/// the way rendered text would break.
const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "dd", "div", "dl", "dt", "fieldset", "figure",
    "footer", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p",
    "pre", "section", "table", "tbody", "td", "th", "thead", "tr", "ul",
];

impl Document {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn data(&self, id: NodeId) -> &NodeData {
        &self.nodes[id.0]
    }

    pub fn is_element(&self, id: NodeId) -> bool {
        matches!(self.data(id).kind, NodeKind::Element { .. })
    }

    /// Lowercase tag name; `None` for text nodes.
    pub fn tag(&self, id: NodeId) -> Option<&str> {
        match &self.data(id).kind {
            NodeKind::Element { tag, .. } => Some(tag),
            NodeKind::Text(_) => None,
        }
    }

    pub fn attr(&self, id: NodeId, name: &str) -> Option<&str> {
        match &self.data(id).kind {
            NodeKind::Element { attributes, .. } => attributes
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| v.as_str()),
            NodeKind::Text(_) => None,
        }
    }

    pub fn has_attr(&self, id: NodeId, name: &str) -> bool {
        self.attr(id, name).is_some()
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.data(id).parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.data(id).children
    }

    pub fn child_elements(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children(id).iter().copied().filter(|c| self.is_element(*c))
    }

    /// 1-based position among same-tag element siblings.
    pub fn positional_index(&self, id: NodeId) -> usize {
        self.data(id).positional_index
    }

    /// All element nodes in document order.
    pub fn elements(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId).filter(|id| self.is_element(*id))
    }

    /// Element descendants of `id` in document order, excluding `id` itself.
    pub fn descendant_elements(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = self.children(id).iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            if self.is_element(n) {
                out.push(n);
            }
            stack.extend(self.children(n).iter().rev());
        }
        out
    }

    pub fn is_ancestor(&self, ancestor: NodeId, node: NodeId) -> bool {
        let mut cur = self.parent(node);
        while let Some(p) = cur {
            if p == ancestor {
                return true;
            }
            cur = self.parent(p);
        }
        false
    }

    pub fn depth(&self, id: NodeId) -> usize {
        let mut d = 0;
        let mut cur = self.parent(id);
        while let Some(p) = cur {
            d += 1;
            cur = self.parent(p);
        }
        d
    }

    fn is_non_content(&self, id: NodeId) -> bool {
        self.tag(id).is_some_and(|t| NON_CONTENT_TAGS.contains(&t))
    }

    /// Raw text pieces below `id`, with `<br>` rendered as a newline and
    /// source whitespace inside each text node collapsed. Script/style text
    /// is skipped. `direct_only` restricts to text children of `id` itself.
    fn text_pieces(&self, id: NodeId, direct_only: bool, out: &mut String) {
        for child in self.children(id) {
            match &self.data(*child).kind {
                // Runs collapse but boundary whitespace survives, so text
                // split across sibling nodes keeps its separating space.
                NodeKind::Text(t) => out.push_str(&collapse_ws_keep_edges(t)),
                NodeKind::Element { tag, .. } => {
                    if tag == "br" {
                        out.push('\n');
                    } else if !direct_only && !self.is_non_content(*child) {
                        let block = BLOCK_TAGS.contains(&tag.as_str());
                        if block {
                            out.push('\n');
                        }
                        self.text_pieces(*child, false, out);
                        if block {
                            out.push('\n');
                        }
                    }
                }
            }
        }
    }

    /// `text` terminal: direct text children joined, `<br>` as newline,
    /// lines trimmed, outer blank lines dropped.
    pub fn direct_text(&self, id: NodeId) -> String {
        let mut raw = String::new();
        self.text_pieces(id, true, &mut raw);
        tidy_lines(&raw)
    }

    /// All descendant text with `<br>` preserved as newlines. This is the
    /// value the field-typing stage classifies.
    pub fn content_text(&self, id: NodeId) -> String {
        let mut raw = String::new();
        self.text_pieces(id, false, &mut raw);
        tidy_lines(&raw)
    }

    /// `inner_text` terminal: descendant text flattened onto one line.
    pub fn inner_text(&self, id: NodeId) -> String {
        collapse_ws(&self.content_text(id)).trim().to_string()
    }

    /// `string` terminal: `inner_text` with leading/trailing punctuation
    /// runs (and the whitespace around them) stripped.
    pub fn string_value(&self, id: NodeId) -> String {
        strip_edge_punctuation(&self.inner_text(id))
    }

    /// True when any descendant of `id` is a `<br>` element.
    pub fn contains_br(&self, id: NodeId) -> bool {
        self.descendant_elements(id)
            .iter()
            .any(|n| self.tag(*n) == Some("br"))
    }

    /// Resolve a [`FieldPath`] relative to `node`. Absence is a value:
    /// a missing step or attribute yields `None`, never an error.
    pub fn resolve_field(&self, node: NodeId, path: &FieldPath) -> Option<String> {
        let mut cur = node;
        for step in &path.steps {
            cur = self
                .child_elements(cur)
                .find(|c| self.tag(*c) == Some(step.tag.as_str()) && self.positional_index(*c) == step.index)?;
        }
        match &path.terminal {
            Terminal::Text => Some(self.direct_text(cur)),
            Terminal::InnerText => Some(self.inner_text(cur)),
            Terminal::StringValue => Some(self.string_value(cur)),
            Terminal::Attr(name) => self.attr(cur, name).map(str::to_string),
        }
    }

    /// All elements matching a structural xpath, in document order.
    pub fn select_structural(&self, xpath: &StructuralXPath) -> Vec<NodeId> {
        self.elements()
            .filter(|id| self.tag(*id) == Some(xpath.tag.as_str()))
            .filter(|id| {
                xpath.predicates.iter().all(|(tag, want)| {
                    self.child_elements(*id)
                        .filter(|c| self.tag(*c) == Some(tag.as_str()))
                        .count()
                        == *want
                })
            })
            .collect()
    }

    /// Absolute positional path of a node, e.g. `/html[1]/body[1]/ul[1]/li[3]`.
    pub fn positional_xpath(&self, id: NodeId) -> String {
        let mut segs = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            if let Some(tag) = self.tag(n) {
                segs.push(format!("{}[{}]", tag, self.positional_index(n)));
            }
            cur = self.parent(n);
        }
        segs.reverse();
        format!("/{}", segs.join("/"))
    }

    /// Inverse of [`Document::positional_xpath`].
    pub fn resolve_positional_xpath(&self, xpath: &str) -> Option<NodeId> {
        let trimmed = xpath.trim().trim_start_matches('/');
        let mut segments = trimmed.split('/');
        let first = segments.next()?;
        let (tag, idx) = split_segment(first)?;
        if self.tag(self.root) != Some(tag) || self.positional_index(self.root) != idx {
            return None;
        }
        let mut cur = self.root;
        for seg in segments {
            let (tag, idx) = split_segment(seg)?;
            cur = self
                .child_elements(cur)
                .find(|c| self.tag(*c) == Some(tag) && self.positional_index(*c) == idx)?;
        }
        Some(cur)
    }
}

fn split_segment(seg: &str) -> Option<(&str, usize)> {
    let open = seg.find('[')?;
    let close = seg.find(']')?;
    let idx = seg[open + 1..close].parse().ok()?;
    Some((&seg[..open], idx))
}

/// Collapse whitespace runs to single spaces, keeping leading/trailing ones.
fn collapse_ws_keep_edges(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = false;
    for ch in s.chars() {
        if ch.is_whitespace() {
            if !in_ws {
                out.push(' ');
            }
            in_ws = true;
        } else {
            in_ws = false;
            out.push(ch);
        }
    }
    out
}

/// Collapse every whitespace run (including newlines) to a single space.
pub fn collapse_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = false;
    for ch in s.chars() {
        if ch.is_whitespace() {
            in_ws = true;
        } else {
            if in_ws && !out.is_empty() {
                out.push(' ');
            }
            in_ws = false;
            out.push(ch);
        }
    }
    out
}

/// Trim each line, drop leading/trailing blank lines, keep interior newlines.
fn tidy_lines(raw: &str) -> String {
    let lines: Vec<&str> = raw.split('\n').map(str::trim).collect();
    let start = lines.iter().position(|l| !l.is_empty());
    let end = lines.iter().rposition(|l| !l.is_empty());
    match (start, end) {
        (Some(s), Some(e)) => lines[s..=e].join("\n"),
        _ => String::new(),
    }
}

fn strip_edge_punctuation(s: &str) -> String {
    s.trim_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation())
        .to_string()
}
