//! Canopied structural signatures of DOM subtrees.
//!
//! A [`TagHash`] records tag names and the *presence* of `id`/`name`
//! attributes (never their values) down to a configured canopy depth. Two
//! subtrees that differ only in attribute values, text, or anything below
//! the canopy hash identically, which is what makes templated structures
//! fall into the same bucket.
//!
//! The canonical serialization is a fixed-layout text form, one node per
//! line, designed to be line-diffed:
//!
//! ```text
//! {'li.00': [
//!   {'a.11': []},
//!   {'p.00': []},
//! ]}
//! ```

use crate::dom::{Document, NodeId};
use crate::error::{Error, Result};

/// Default canopy depth used across the pipeline.
pub const DEFAULT_CANOPY_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TagHash {
    /// `<tag>.<id-bit><name-bit>`, e.g. `li.00`, `a.11`.
    pub key: String,
    pub children: Vec<TagHash>,
}

impl TagHash {
    pub fn leaf(key: impl Into<String>) -> Self {
        TagHash {
            key: key.into(),
            children: Vec::new(),
        }
    }

    pub fn node(key: impl Into<String>, children: Vec<TagHash>) -> Self {
        TagHash {
            key: key.into(),
            children,
        }
    }
}

fn hash_key(doc: &Document, id: NodeId) -> String {
    let tag: String = doc
        .tag(id)
        .unwrap_or("")
        .chars()
        .filter(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        .collect();
    let id_bit = u8::from(doc.has_attr(id, "id"));
    let name_bit = u8::from(doc.has_attr(id, "name"));
    format!("{tag}.{id_bit}{name_bit}")
}

/// Compute the canopied signature of the subtree rooted at `node`,
/// descending `depth` levels below it. Nodes at the depth limit keep
/// empty child lists; text nodes are ignored everywhere.
pub fn tag_hash(doc: &Document, node: NodeId, depth: usize) -> TagHash {
    let children = if depth == 0 {
        Vec::new()
    } else {
        doc.child_elements(node)
            .map(|c| tag_hash(doc, c, depth - 1))
            .collect()
    };
    TagHash {
        key: hash_key(doc, node),
        children,
    }
}

/// Number of nodes in the hash tree, root included.
pub fn total_tags(h: &TagHash) -> usize {
    1 + h.children.iter().map(total_tags).sum::<usize>()
}

/// Canonical multi-line serialization. Deterministic: equal hashes
/// serialize to byte-identical text, and every child line carries a
/// trailing comma so appending a sibling never rewrites earlier lines.
pub fn serialize(h: &TagHash) -> String {
    let mut out = String::new();
    write_node(h, 0, false, &mut out);
    out
}

fn write_node(h: &TagHash, indent: usize, comma: bool, out: &mut String) {
    let pad = "  ".repeat(indent);
    let tail = if comma { "," } else { "" };
    if h.children.is_empty() {
        out.push_str(&format!("{pad}{{'{}': []}}{tail}\n", h.key));
    } else {
        out.push_str(&format!("{pad}{{'{}': [\n", h.key));
        for child in &h.children {
            write_node(child, indent + 1, true, out);
        }
        out.push_str(&format!("{pad}]}}{tail}\n"));
    }
}

/// Parse the canonical form back into a [`TagHash`].
pub fn parse_serialized(text: &str) -> Result<TagHash> {
    let mut parser = Parser {
        input: text,
        pos: 0,
    };
    let hash = parser.node()?;
    parser.skip_ws_and_commas();
    if parser.pos != parser.input.len() {
        return Err(Error::TagHashParse("trailing content".into()));
    }
    Ok(hash)
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.input.len() - trimmed.len();
    }

    fn skip_ws_and_commas(&mut self) {
        loop {
            self.skip_ws();
            if self.rest().starts_with(',') {
                self.pos += 1;
            } else {
                return;
            }
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(Error::TagHashParse(format!(
                "expected {token:?} near offset {}",
                self.pos
            )))
        }
    }

    fn node(&mut self) -> Result<TagHash> {
        self.expect("{")?;
        self.expect("'")?;
        let rest = self.rest();
        let end = rest
            .find('\'')
            .ok_or_else(|| Error::TagHashParse("unterminated key".into()))?;
        let key = &rest[..end];
        if !valid_key(key) {
            return Err(Error::TagHashParse(format!("bad key {key:?}")));
        }
        self.pos += end + 1;
        self.expect(":")?;
        self.expect("[")?;
        let mut children = Vec::new();
        loop {
            self.skip_ws_and_commas();
            if self.rest().starts_with(']') {
                self.pos += 1;
                break;
            }
            children.push(self.node()?);
        }
        self.expect("}")?;
        Ok(TagHash {
            key: key.to_string(),
            children,
        })
    }
}

fn valid_key(key: &str) -> bool {
    match key.split_once('.') {
        Some((tag, bits)) => {
            !tag.is_empty()
                && tag.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
                && bits.len() == 2
                && bits.chars().all(|c| c == '0' || c == '1')
        }
        None => false,
    }
}
