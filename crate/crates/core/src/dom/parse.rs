//! Lenient HTML parsing. Parsing never fails on malformed markup; the only
//! errors are empty input and undecodable bytes.

use html5ever::tendril::TendrilSink;
use html5ever::{parse_document, ParseOpts};
use markup5ever_rcdom::{Handle, NodeData as RcNodeData, RcDom};

use super::{Document, NodeData, NodeId, NodeKind};
use crate::error::{Error, Result};

/// Parse an HTML string into an immutable [`Document`].
pub fn parse_html(input: &str) -> Result<Document> {
    parse_html_with_url(input, None)
}

pub fn parse_html_with_url(input: &str, source_url: Option<String>) -> Result<Document> {
    if input.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let dom = parse_document(RcDom::default(), ParseOpts::default())
        .from_utf8()
        .one(input.as_bytes());
    build_document(&dom, source_url)
}

/// Byte-level entry point; rejects non-UTF-8 input instead of lossy-decoding.
pub fn parse_html_bytes(input: &[u8], source_url: Option<String>) -> Result<Document> {
    let text = std::str::from_utf8(input).map_err(|_| Error::InvalidEncoding)?;
    parse_html_with_url(text, source_url)
}

fn build_document(dom: &RcDom, source_url: Option<String>) -> Result<Document> {
    let mut nodes: Vec<NodeData> = Vec::new();
    let root = convert(&dom.document, None, &mut nodes)
        .into_iter()
        .next()
        .ok_or(Error::EmptyInput)?;
    let mut doc = Document {
        nodes,
        root,
        source_url,
        snapshot_id: String::new(),
    };
    assign_positions(&mut doc, root);
    Ok(doc)
}

/// Convert an rcdom handle; returns the ids of nodes created at this level.
/// The html5ever document node and comments/doctypes vanish here.
fn convert(handle: &Handle, parent: Option<NodeId>, nodes: &mut Vec<NodeData>) -> Vec<NodeId> {
    match &handle.data {
        RcNodeData::Document => {
            let mut out = Vec::new();
            for child in handle.children.borrow().iter() {
                out.extend(convert(child, None, nodes));
            }
            out
        }
        RcNodeData::Element { name, attrs, .. } => {
            let id = NodeId(nodes.len());
            let attributes = attrs
                .borrow()
                .iter()
                .map(|a| (a.name.local.to_string().to_lowercase(), a.value.to_string()))
                .collect();
            nodes.push(NodeData {
                parent,
                kind: NodeKind::Element {
                    tag: name.local.to_string().to_lowercase(),
                    attributes,
                },
                children: Vec::new(),
                positional_index: 0,
            });
            let mut children = Vec::new();
            for child in handle.children.borrow().iter() {
                children.extend(convert(child, Some(id), nodes));
            }
            nodes[id.0].children = children;
            vec![id]
        }
        RcNodeData::Text { contents } => {
            let text = contents.borrow().to_string();
            if text.is_empty() {
                return Vec::new();
            }
            let id = NodeId(nodes.len());
            nodes.push(NodeData {
                parent,
                kind: NodeKind::Text(text),
                children: Vec::new(),
                positional_index: 0,
            });
            vec![id]
        }
        _ => Vec::new(),
    }
}

fn assign_positions(doc: &mut Document, id: NodeId) {
    let children = doc.nodes[id.0].children.clone();
    let mut counts: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for child in &children {
        if let NodeKind::Element { tag, .. } = &doc.nodes[child.0].kind {
            let n = counts.entry(tag.clone()).or_insert(0);
            *n += 1;
            doc.nodes[child.0].positional_index = *n;
        }
    }
    for child in children {
        assign_positions(doc, child);
    }
    if doc.nodes[id.0].parent.is_none() {
        doc.nodes[id.0].positional_index = 1;
    }
}
