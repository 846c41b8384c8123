use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One `tag[index]` step of a field path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathStep {
    pub tag: String,
    /// 1-based among same-tag siblings.
    pub index: usize,
}

/// How the final node of a field path is turned into a string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    /// Direct text children only.
    Text,
    /// All descendant text, flattened.
    InnerText,
    /// `inner_text` with edge punctuation stripped.
    StringValue,
    /// An attribute value.
    Attr(String),
}

/// Positional address of a field relative to a structure anchor,
/// rendered as `p[3]/span[2]/a[1]/@href` or `h3[1]/string`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldPath {
    pub steps: Vec<PathStep>,
    pub terminal: Terminal,
}

impl FieldPath {
    pub fn new(steps: Vec<PathStep>, terminal: Terminal) -> Self {
        FieldPath { steps, terminal }
    }

    /// The same steps with a different terminal accessor.
    pub fn with_terminal(&self, terminal: Terminal) -> Self {
        FieldPath {
            steps: self.steps.clone(),
            terminal,
        }
    }
}

impl fmt::Display for FieldPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            write!(f, "{}[{}]/", step.tag, step.index)?;
        }
        match &self.terminal {
            Terminal::Text => write!(f, "text"),
            Terminal::InnerText => write!(f, "inner_text"),
            Terminal::StringValue => write!(f, "string"),
            Terminal::Attr(name) => write!(f, "@{name}"),
        }
    }
}

impl FromStr for FieldPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let err = || Error::FieldPathParse(s.to_string());
        let mut parts: Vec<&str> = s.trim().split('/').collect();
        let last = parts.pop().ok_or_else(err)?;
        let terminal = match last {
            "text" => Terminal::Text,
            "inner_text" => Terminal::InnerText,
            "string" => Terminal::StringValue,
            attr if attr.starts_with('@') && attr.len() > 1 => Terminal::Attr(attr[1..].to_string()),
            _ => return Err(err()),
        };
        let mut steps = Vec::new();
        for part in parts {
            let open = part.find('[').ok_or_else(err)?;
            if !part.ends_with(']') {
                return Err(err());
            }
            let tag = &part[..open];
            let index: usize = part[open + 1..part.len() - 1].parse().map_err(|_| err())?;
            if tag.is_empty() || index == 0 {
                return Err(err());
            }
            steps.push(PathStep {
                tag: tag.to_string(),
                index,
            });
        }
        Ok(FieldPath { steps, terminal })
    }
}

impl Serialize for FieldPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
